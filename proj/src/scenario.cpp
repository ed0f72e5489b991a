#include "edverify/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <future>
#include <map>
#include <sstream>
#include <stdexcept>

#include "edverify/dimension.hpp"
#include "edverify/geometry.hpp"
#include "edverify/instances.hpp"
#include "edverify/rng.hpp"

namespace edv {

namespace {

// Seed streams derived from the one scenario seed.
constexpr std::uint64_t kGeneratorStream = 0;
constexpr std::uint64_t kStrategyStream = 1;

std::map<std::string, std::pair<std::size_t, std::string>> keyvalues(
    const std::string& text) {
    std::map<std::string, std::pair<std::size_t, std::string>> out;
    std::istringstream in(text);
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream probe(line);
        std::string key;
        if (!(probe >> key)) continue;
        std::string value;
        std::getline(probe, value);
        const std::size_t start = value.find_first_not_of(" \t");
        value = start == std::string::npos ? "" : value.substr(start);
        const std::size_t end = value.find_last_not_of(" \t\r");
        if (end != std::string::npos) value = value.substr(0, end + 1);
        if (!out.emplace(key, std::make_pair(no, value)).second) {
            throw std::invalid_argument("scenario: duplicate key '" + key + "' (line " +
                                        std::to_string(no) + ")");
        }
    }
    return out;
}

std::string fmt_short(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::vector<DocId> split_ids(const std::string& value) {
    std::vector<DocId> ids;
    std::string current;
    for (char c : value) {
        if (c == ',') {
            if (!current.empty()) ids.push_back(current);
            current.clear();
        } else if (c != ' ') {
            current += c;
        }
    }
    if (!current.empty()) ids.push_back(current);
    return ids;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    auto kv = keyvalues(text);
    const auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string value = it->second.second;
        kv.erase(it);
        return value;
    };
    const auto require = [&](const std::string& key) {
        auto v = take(key);
        if (!v) throw std::invalid_argument("scenario: missing required key '" + key + "'");
        return *v;
    };
    const auto to_u64 = [](const std::string& key, const std::string& v) -> std::uint64_t {
        try {
            return std::stoull(v);
        } catch (const std::exception&) {
            throw std::invalid_argument("scenario: key '" + key + "' needs an integer, got '" +
                                        v + "'");
        }
    };
    const auto to_double = [](const std::string& key, const std::string& v) -> double {
        try {
            return std::stod(v);
        } catch (const std::exception&) {
            throw std::invalid_argument("scenario: key '" + key + "' needs a number, got '" +
                                        v + "'");
        }
    };

    Scenario s;
    s.version = static_cast<int>(to_u64("version", require("version")));
    if (s.version != 1) {
        throw std::invalid_argument("scenario: unsupported version " +
                                    std::to_string(s.version));
    }

    const std::string gen = require("generator");
    if (gen == "margin_third") {
        s.generator = Scenario::Generator::MarginThird;
        s.n = to_u64("n", require("n"));
    } else if (gen == "small_margin") {
        s.generator = Scenario::Generator::SmallMargin;
        s.gamma = to_double("gamma", require("gamma"));
        s.d = to_u64("d", require("d"));
        s.k = to_u64("k", require("k"));
    } else if (gen == "random_separable") {
        s.generator = Scenario::Generator::RandomSeparable;
        s.gamma = to_double("gamma", require("gamma"));
        s.d = to_u64("d", require("d"));
        s.n = to_u64("n", require("n"));
    } else if (gen == "explicit_file") {
        s.generator = Scenario::Generator::ExplicitFile;
        s.path = require("path");
    } else {
        throw std::invalid_argument("scenario: unknown generator '" + gen + "'");
    }

    const std::string cls = require("class");
    if (cls == "linear_margin") {
        s.cls = Scenario::ClassKind::LinearMargin;
        s.class_gamma = to_double("class_gamma", require("class_gamma"));
    } else if (cls == "finite") {
        s.cls = Scenario::ClassKind::Finite;
        s.class_path = require("class_path");
    } else {
        throw std::invalid_argument("scenario: unknown class '" + cls + "'");
    }

    const std::string strategy = take("strategy").value_or("truthful");
    if (strategy == "truthful") {
        s.strategy = AliceStrategy::truthful();
    } else if (strategy == "hide_positives") {
        s.strategy = AliceStrategy::hide_positives(split_ids(require("strategy_ids")));
    } else if (strategy == "flip_set") {
        s.strategy = AliceStrategy::flip_set(split_ids(require("strategy_ids")));
    } else if (strategy == "random_errors") {
        // The draw seed is derived from the scenario seed after parsing.
        s.strategy =
            AliceStrategy::random_errors(to_u64("strategy_count", require("strategy_count")), 0);
    } else {
        throw std::invalid_argument("scenario: unknown strategy '" + strategy + "'");
    }

    const std::string mode = take("mode").value_or("realizable");
    if (mode == "realizable") {
        s.mode = Scenario::Mode::Realizable;
    } else if (mode == "robust") {
        s.mode = Scenario::Mode::Robust;
        s.slack = to_u64("slack", require("slack"));
    } else if (mode == "error_tolerant") {
        s.mode = Scenario::Mode::ErrorTolerant;
        const std::string inner = take("inner").value_or("realizable");
        if (inner == "robust") {
            s.inner_robust = true;
            s.slack = to_u64("slack", require("slack"));
        } else if (inner != "realizable") {
            throw std::invalid_argument("scenario: unknown inner mode '" + inner + "'");
        }
    } else {
        throw std::invalid_argument("scenario: unknown mode '" + mode + "'");
    }

    if (auto v = take("seed")) s.seed = to_u64("seed", *v);
    if (auto v = take("output")) s.output = *v;
    s.strategy.seed = split_seed(s.seed, kStrategyStream);

    if (!kv.empty()) {
        throw std::invalid_argument("scenario: unknown key '" + kv.begin()->first +
                                    "' (line " + std::to_string(kv.begin()->second.first) +
                                    ")");
    }
    return s;
}

namespace {

Instance build_instance(const Scenario& s) {
    switch (s.generator) {
        case Scenario::Generator::MarginThird: {
            const VectorFamily f = construct_margin_third(s.n);
            return instance_from_points(f.points, std::vector<int>(f.size(), -1));
        }
        case Scenario::Generator::SmallMargin: {
            const auto f =
                construct_small_margin(s.gamma, s.d, split_seed(s.seed, kGeneratorStream), s.k);
            if (!f) {
                throw std::runtime_error("small_margin construction failed for this seed");
            }
            return instance_from_points(f->points, std::vector<int>(f->size(), -1));
        }
        case Scenario::Generator::RandomSeparable:
            return random_separable_instance(s.gamma, s.d, s.n,
                                             split_seed(s.seed, kGeneratorStream));
        case Scenario::Generator::ExplicitFile:
            return instance_from_text(read_text_file(s.path));
    }
    throw std::logic_error("unreachable generator kind");
}

std::unique_ptr<HypothesisOracle> build_oracle(const Scenario& s) {
    if (s.cls == Scenario::ClassKind::LinearMargin) {
        return std::make_unique<LinearMarginOracle>(s.class_gamma);
    }
    return std::make_unique<FiniteClassOracle>(finite_class_from_text(read_text_file(s.class_path)));
}

// Exact isolation dimension of the class over the instance points, attempted
// only at sizes where the search is immediate.
std::optional<std::size_t> try_loo(const Instance& inst, const HypothesisOracle& oracle) {
    if (inst.size() == 0) return 0;
    if (inst.size() > 16) return std::nullopt;
    std::vector<Vec> points;
    for (const Document& d : inst.documents) points.push_back(d.point);
    const IsolationPredicate pred = [&](std::size_t c,
                                        const std::vector<std::size_t>& candidate) {
        LabeledSet q;
        q.points.push_back(points[c]);
        q.labels.push_back(1);
        for (std::size_t i : candidate) {
            if (i == c) continue;
            q.points.push_back(points[i]);
            q.labels.push_back(-1);
        }
        return oracle.membership(q).realizable;
    };
    try {
        return loo_dimension_lazy(inst.size(), pred).k;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace

ScenarioOutcome run_scenario(const Scenario& scenario, const std::string& out_dir) {
    ScenarioOutcome outcome;
    outcome.instance = build_instance(scenario);
    const std::unique_ptr<HypothesisOracle> oracle = build_oracle(scenario);

    switch (scenario.mode) {
        case Scenario::Mode::Realizable:
            outcome.run = run_realizable(outcome.instance, scenario.strategy, *oracle);
            break;
        case Scenario::Mode::Robust:
            outcome.run =
                run_robust(outcome.instance, scenario.strategy, *oracle, scenario.slack);
            break;
        case Scenario::Mode::ErrorTolerant: {
            ErrorTolerantConfig config;
            config.robust = scenario.inner_robust;
            config.slack = scenario.slack;
            outcome.run =
                run_error_tolerant(outcome.instance, scenario.strategy, *oracle, config);
            break;
        }
    }

    const Transcript& t = outcome.run.transcript;
    Summary& summary = outcome.summary;
    summary.recall = outcome.run.metrics.recall;
    summary.disclosure = outcome.run.metrics.nonresponsive_disclosure;
    summary.detected_errors = t.detected_errors;
    summary.oracle_calls = t.oracle_calls;
    summary.rounds = t.rounds;

    if (scenario.cls == Scenario::ClassKind::LinearMargin &&
        scenario.class_gamma > 1.0 / 3.0) {
        const bool robust_bound =
            scenario.mode == Scenario::Mode::Robust ||
            (scenario.mode == Scenario::Mode::ErrorTolerant && scenario.inner_robust);
        summary.k_bound = robust_bound ? robust_loo_bound(scenario.class_gamma,
                                                          scenario.class_gamma, scenario.slack)
                                       : loo_bound(scenario.class_gamma);
    }
    summary.loo_dimension = try_loo(outcome.instance, *oracle);

    // Invariant suite: what this run promises, checked on the transcript.
    auto& failures = summary.failures;
    if (t.aborted) failures.push_back("run aborted");
    {
        std::vector<DocId> disclosed = t.disclosed;
        std::sort(disclosed.begin(), disclosed.end());
        if (std::adjacent_find(disclosed.begin(), disclosed.end()) != disclosed.end()) {
            failures.push_back("disclosed set has duplicates");
        }
        for (const DocId& id : t.adjudicated) {
            if (!std::binary_search(disclosed.begin(), disclosed.end(), id)) {
                failures.push_back("adjudicated document never disclosed: " + id);
            }
        }
    }
    {
        const Metrics again = compute_metrics(outcome.instance, t);
        if (again.recall != outcome.run.metrics.recall ||
            again.nonresponsive_disclosure != outcome.run.metrics.nonresponsive_disclosure) {
            failures.push_back("metrics do not reproduce from the transcript");
        }
    }
    const bool truthful = scenario.strategy.kind == AliceStrategy::Kind::Truthful;
    if (truthful && !t.full_disclosure) {
        if (summary.k_bound &&
            static_cast<double>(summary.disclosure) > *summary.k_bound) {
            failures.push_back("disclosure exceeds the closed-form ceiling");
        }
        if (summary.loo_dimension && summary.disclosure > *summary.loo_dimension) {
            failures.push_back("disclosure exceeds the isolation dimension");
        }
    }
    const bool robust_mode =
        scenario.mode == Scenario::Mode::Robust ||
        (scenario.mode == Scenario::Mode::ErrorTolerant && scenario.inner_robust);
    if (!robust_mode) {
        if (summary.recall != 1.0) failures.push_back("recall below one");
    } else {
        const std::size_t n_plus = outcome.instance.n_plus();
        const double floor_recall =
            n_plus == 0 ? 1.0
                        : 1.0 - static_cast<double>(scenario.slack) / static_cast<double>(n_plus);
        if (summary.recall + 1e-12 < floor_recall) {
            failures.push_back("recall below the robust floor");
        }
    }
    if (summary.oracle_calls > std::max<std::size_t>(1, t.rounds) * outcome.instance.size()) {
        failures.push_back("oracle call budget exceeded");
    }
    summary.invariants_pass = failures.empty();
    outcome.passed = summary.invariants_pass;

    std::filesystem::create_directories(out_dir);
    const std::string base = scenario.output.empty() ? "scenario" : scenario.output;
    outcome.summary_path = out_dir + "/" + base + "-summary.txt";
    outcome.event_log_path = out_dir + "/" + base + "-events.log";
    write_text_file(outcome.summary_path, summary_to_text(summary));
    write_text_file(outcome.event_log_path, event_log_to_text(t));
    return outcome;
}

namespace {

SweepCell sweep_cell(double gamma, std::uint64_t seed, std::size_t d, std::size_t n,
                     std::size_t target_k) {
    SweepCell cell;
    cell.gamma = gamma;
    cell.seed = seed;
    cell.family_size = "-";
    cell.disclosure = "-";
    cell.bound = "-";
    try {
        if (gamma > 1.0 / 3.0 + 1e-9) {
            cell.regime = "bounded";
            const Instance inst = random_separable_instance(gamma, d, n, seed);
            const LinearMarginOracle oracle(gamma);
            const RunResult r = run_realizable(inst, AliceStrategy::truthful(), oracle);
            cell.disclosure = std::to_string(r.metrics.nonresponsive_disclosure);
            const double bound = loo_bound(gamma);
            cell.bound = fmt_short(std::floor(bound));
            cell.status =
                static_cast<double>(r.metrics.nonresponsive_disclosure) <= bound && !r.transcript.aborted
                    ? "ok"
                    : "bound_violated";
        } else if (gamma > 1.0 / 3.0 - 1e-9) {
            cell.regime = "linear";
            if (d < 3) throw std::runtime_error("need d >= 3 for the 1/3 family");
            const std::size_t size = d - 1;
            const VectorFamily f = construct_margin_third(size);
            const Instance inst =
                instance_from_points(f.points, std::vector<int>(f.size(), -1));
            const LinearMarginOracle oracle(1.0 / 3.0);
            const RunResult r = run_realizable(inst, AliceStrategy::truthful(), oracle);
            cell.family_size = std::to_string(size);
            cell.disclosure = std::to_string(r.metrics.nonresponsive_disclosure);
            cell.bound = "Omega(d)";
            cell.status = r.metrics.nonresponsive_disclosure == size ? "ok" : "size_mismatch";
        } else {
            cell.regime = "exponential";
            const auto f = construct_small_margin(gamma, d, seed, target_k);
            if (!f) {
                cell.status = "construction_failed";
                return cell;
            }
            const SkewObtuseReport report = verify_skew_obtuse(*f, gamma, gamma);
            const Instance inst =
                instance_from_points(f->points, std::vector<int>(f->size(), -1));
            const LinearMarginOracle oracle(gamma);
            const RunResult r = run_realizable(inst, AliceStrategy::truthful(), oracle);
            cell.family_size = std::to_string(f->size());
            cell.disclosure = std::to_string(r.metrics.nonresponsive_disclosure);
            cell.bound = "exp(Omega(d))";
            cell.status = report.holds && !r.transcript.aborted ? "ok" : "verification_failed";
        }
    } catch (const std::exception& ex) {
        cell.status = std::string("error: ") + ex.what();
    }
    return cell;
}

}  // namespace

SweepResult sweep_trichotomy(const std::vector<double>& gammas, std::size_t d,
                             const std::vector<std::uint64_t>& seeds,
                             const std::string& out_dir, std::size_t n,
                             std::size_t target_k) {
    SweepResult result;
    std::vector<std::future<SweepCell>> jobs;
    for (double gamma : gammas) {
        for (std::uint64_t seed : seeds) {
            jobs.push_back(std::async(std::launch::async, sweep_cell, gamma, seed, d, n,
                                      target_k));
        }
    }
    for (auto& job : jobs) result.cells.push_back(job.get());

    std::string table = "gamma seed regime family_size disclosure bound status\n";
    bool all_ok = true;
    for (const SweepCell& c : result.cells) {
        table += fmt_short(c.gamma);
        table += ' ' + std::to_string(c.seed);
        table += ' ' + c.regime;
        table += ' ' + c.family_size;
        table += ' ' + c.disclosure;
        table += ' ' + c.bound;
        table += ' ' + c.status;
        table += '\n';
        all_ok = all_ok && c.status == "ok";
    }
    result.table = std::move(table);
    result.all_ok = all_ok;

    std::filesystem::create_directories(out_dir);
    result.table_path = out_dir + "/sweep.txt";
    write_text_file(result.table_path, result.table);
    return result;
}

}  // namespace edv
