#include "edverify/protocol.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <utility>

#include "edverify/critical.hpp"
#include "edverify/dimension.hpp"
#include "edverify/rng.hpp"

namespace edv {

std::size_t Instance::n_plus() const {
    std::size_t n = 0;
    for (const Document& d : documents) n += d.true_label == 1;
    return n;
}

std::size_t Instance::index_of(const DocId& id) const {
    for (std::size_t i = 0; i < documents.size(); ++i) {
        if (documents[i].id == id) return i;
    }
    throw std::invalid_argument("Instance: unknown document id '" + id + "'");
}

void validate_instance(const Instance& instance) {
    std::set<DocId> seen;
    for (const Document& d : instance.documents) {
        if (d.id.empty()) throw std::invalid_argument("Instance: empty document id");
        if (!seen.insert(d.id).second) {
            throw std::invalid_argument("Instance: duplicate document id '" + d.id + "'");
        }
        if (d.true_label != 1 && d.true_label != -1) {
            throw std::invalid_argument("Instance: true_label must be +1 or -1");
        }
        if (!all_finite(d.point)) {
            throw std::invalid_argument("Instance: non-finite coordinate in '" + d.id + "'");
        }
        if (d.point.size() != instance.documents.front().point.size()) {
            throw std::invalid_argument("Instance: documents have mixed dimensions");
        }
        if (norm(d.point) < 1e-300) {
            throw std::invalid_argument("Instance: zero-norm point in '" + d.id + "'");
        }
    }
}

AliceStrategy AliceStrategy::truthful() { return {}; }

AliceStrategy AliceStrategy::hide_positives(std::vector<DocId> ids) {
    AliceStrategy s;
    s.kind = Kind::HidePositives;
    s.ids = std::move(ids);
    return s;
}

AliceStrategy AliceStrategy::flip_set(std::vector<DocId> ids) {
    AliceStrategy s;
    s.kind = Kind::FlipSet;
    s.ids = std::move(ids);
    return s;
}

AliceStrategy AliceStrategy::random_errors(std::size_t count, std::uint64_t seed) {
    AliceStrategy s;
    s.kind = Kind::RandomErrors;
    s.error_count = count;
    s.seed = seed;
    return s;
}

std::vector<int> alice_report(const Instance& instance, const AliceStrategy& alice) {
    std::vector<int> labels;
    labels.reserve(instance.size());
    for (const Document& d : instance.documents) labels.push_back(d.true_label);

    const auto resolve_targets = [&]() {
        std::vector<std::size_t> idx;
        std::set<DocId> seen;
        for (const DocId& id : alice.ids) {
            if (!seen.insert(id).second) {
                throw std::invalid_argument("AliceStrategy: duplicate target id '" + id + "'");
            }
            idx.push_back(instance.index_of(id));
        }
        return idx;
    };

    switch (alice.kind) {
        case AliceStrategy::Kind::Truthful:
            break;
        case AliceStrategy::Kind::HidePositives:
            for (std::size_t i : resolve_targets()) {
                if (instance.documents[i].true_label != 1) {
                    throw std::invalid_argument("AliceStrategy: hide target '" +
                                                instance.documents[i].id +
                                                "' is not a true positive");
                }
                labels[i] = -1;
            }
            break;
        case AliceStrategy::Kind::FlipSet:
            for (std::size_t i : resolve_targets()) labels[i] = -labels[i];
            break;
        case AliceStrategy::Kind::RandomErrors: {
            if (alice.error_count > instance.size()) {
                throw std::invalid_argument("AliceStrategy: more errors than documents");
            }
            std::vector<std::size_t> pool(instance.size());
            for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
            Rng rng(alice.seed);
            for (std::size_t e = 0; e < alice.error_count; ++e) {
                const std::size_t pick = e + rng.index(pool.size() - e);
                std::swap(pool[e], pool[pick]);
                labels[pool[e]] = -labels[pool[e]];
            }
            break;
        }
    }
    return labels;
}

BobStrategy BobStrategy::faithful() { return {}; }

BobStrategy BobStrategy::false_disputes(std::vector<DocId> ids) {
    BobStrategy b;
    b.dispute_ids = std::move(ids);
    return b;
}

const char* event_kind_name(EventKind kind) {
    switch (kind) {
        case EventKind::AliceReport: return "alice_report";
        case EventKind::Precheck: return "precheck";
        case EventKind::CriticalSet: return "critical_set";
        case EventKind::SendToBob: return "send_to_bob";
        case EventKind::Disputes: return "disputes";
        case EventKind::CourtRuling: return "court_ruling";
        case EventKind::Relabel: return "relabel";
        case EventKind::FullDisclosure: return "full_disclosure";
        case EventKind::Failure: return "failure";
        case EventKind::RoundClean: return "round_clean";
    }
    return "unknown";
}

Metrics compute_metrics(const Instance& instance, const Transcript& transcript) {
    std::size_t revealed_pos = 0;
    std::size_t revealed_neg = 0;
    for (const DocId& id : transcript.disclosed) {
        const Document& d = instance.documents[instance.index_of(id)];
        (d.true_label == 1 ? revealed_pos : revealed_neg) += 1;
    }
    Metrics m;
    const std::size_t n_plus = instance.n_plus();
    m.recall = n_plus == 0 ? 1.0 : static_cast<double>(revealed_pos) / n_plus;
    m.nonresponsive_disclosure = revealed_neg;
    return m;
}

namespace {

// One protocol execution's mutable state; the run_* entry points differ only
// in pre-check, scan flavor, and what a ruling against Alice triggers.
class ProtocolRun {
public:
    ProtocolRun(const Instance& instance, const HypothesisOracle& oracle,
                const BobStrategy& bob)
        : inst_(instance),
          oracle_(oracle),
          disclosed_mask_(instance.size(), 0),
          adjudicated_mask_(instance.size(), 0),
          detected_mask_(instance.size(), 0) {
        validate_instance(instance);
        bob_dispute_mask_.assign(inst_.size(), 0);
        for (const DocId& id : bob.dispute_ids) bob_dispute_mask_[inst_.index_of(id)] = 1;
    }

    Transcript take_transcript() { return std::move(t_); }

    void set_report(std::vector<int> labels) {
        alice_ = std::move(labels);
        std::vector<DocId> positives;
        for (std::size_t i = 0; i < inst_.size(); ++i) {
            if (alice_[i] == 1) positives.push_back(inst_.documents[i].id);
        }
        push(EventKind::AliceReport, 1, std::move(positives));
    }

    const std::vector<int>& report() const { return alice_; }

    // Pre-check on Alice's full report; returns pass/fail. Robust when
    // slack > 0 or `robust` is set.
    bool precheck(std::size_t round, bool robust, std::size_t slack) {
        LabeledSet full;
        for (std::size_t i = 0; i < inst_.size(); ++i) {
            full.points.push_back(inst_.documents[i].point);
            full.labels.push_back(alice_[i]);
        }
        ++t_.precheck_calls;
        const OracleVerdict v =
            robust ? oracle_.fit_with_slack(full, slack) : oracle_.membership(full);
        push(EventKind::Precheck, round, {}, v.realizable ? "pass" : "fail");
        return v.realizable;
    }

    // Scan + send + adjudicate. Returns the documents ruled against Alice
    // this round, in ascending document order.
    std::vector<std::size_t> round_core(std::size_t round, bool robust, std::size_t slack,
                                        std::vector<std::size_t> verified) {
        CriticalRequest req;
        for (const Document& d : inst_.documents) req.points.push_back(d.point);
        for (std::size_t i = 0; i < inst_.size(); ++i) {
            if (alice_[i] == 1) req.alice_positive.push_back(i);
        }
        req.slack = slack;
        req.verified_negative = std::move(verified);

        const CriticalResult scan =
            !req.verified_negative.empty() ? critical_points_verified(req, oracle_)
            : robust                       ? robust_critical_points(req, oracle_)
                                           : critical_points(req, oracle_);
        t_.oracle_calls += scan.oracle_calls;
        push(EventKind::CriticalSet, round, ids_of(scan.critical));

        std::vector<std::size_t> sent = req.alice_positive;
        sent.insert(sent.end(), scan.critical.begin(), scan.critical.end());
        std::sort(sent.begin(), sent.end());
        push(EventKind::SendToBob, round, ids_of(sent));
        for (std::size_t i : sent) disclose(i);

        std::vector<std::size_t> disputes;
        for (std::size_t i : sent) {
            const int truth = inst_.documents[i].true_label;
            const int bob_label = bob_dispute_mask_[i] ? -truth : truth;
            if (bob_label != alice_[i]) disputes.push_back(i);
        }
        push(EventKind::Disputes, round, ids_of(disputes));

        std::vector<std::size_t> against;
        for (std::size_t i : disputes) {
            if (!adjudicated_mask_[i]) {
                adjudicated_mask_[i] = 1;
                t_.adjudicated.push_back(inst_.documents[i].id);
            }
            ++t_.court_rulings;
            const bool ruled_against = inst_.documents[i].true_label != alice_[i];
            push(EventKind::CourtRuling, round, {inst_.documents[i].id},
                 ruled_against ? "against_alice" : "for_alice");
            if (ruled_against) {
                against.push_back(i);
                if (!detected_mask_[i]) {
                    detected_mask_[i] = 1;
                    ++t_.detected_errors;
                }
            }
        }
        return against;
    }

    void full_disclose(std::size_t round, const std::string& reason) {
        std::vector<DocId> all;
        for (std::size_t i = 0; i < inst_.size(); ++i) {
            disclose(i);
            all.push_back(inst_.documents[i].id);
        }
        t_.full_disclosure = true;
        push(EventKind::FullDisclosure, round, std::move(all), reason);
    }

    void round_clean(std::size_t round) { push(EventKind::RoundClean, round); }

    void fail(std::size_t round, const std::string& note) {
        t_.aborted = true;
        push(EventKind::Failure, round, {}, note);
    }

    void relabel_truthfully(std::size_t round, const std::vector<std::size_t>& docs) {
        push(EventKind::Relabel, round, ids_of(docs));
        for (std::size_t i : docs) alice_[i] = inst_.documents[i].true_label;
    }

    // Disclosed documents whose true label is negative and whose current
    // report label is negative: the verified constraints for later rounds.
    std::vector<std::size_t> verified_negatives() const {
        std::vector<std::size_t> v;
        for (std::size_t i = 0; i < inst_.size(); ++i) {
            if (disclosed_mask_[i] && inst_.documents[i].true_label == -1 &&
                alice_[i] == -1) {
                v.push_back(i);
            }
        }
        return v;
    }

    void set_rounds(std::size_t r) { t_.rounds = r; }

private:
    void disclose(std::size_t i) {
        if (!disclosed_mask_[i]) {
            disclosed_mask_[i] = 1;
            t_.disclosed.push_back(inst_.documents[i].id);
        }
    }

    std::vector<DocId> ids_of(const std::vector<std::size_t>& idx) const {
        std::vector<DocId> ids;
        ids.reserve(idx.size());
        for (std::size_t i : idx) ids.push_back(inst_.documents[i].id);
        return ids;
    }

    void push(EventKind kind, std::size_t round, std::vector<DocId> ids = {},
              std::string note = {}) {
        t_.events.push_back({kind, round, std::move(ids), std::move(note)});
    }

    const Instance& inst_;
    const HypothesisOracle& oracle_;
    Transcript t_;
    std::vector<int> alice_;
    std::vector<char> disclosed_mask_;
    std::vector<char> adjudicated_mask_;
    std::vector<char> detected_mask_;
    std::vector<char> bob_dispute_mask_;
};

RunResult finish(const Instance& instance, ProtocolRun& run) {
    RunResult r;
    r.transcript = run.take_transcript();
    r.metrics = compute_metrics(instance, r.transcript);
    return r;
}

// Shared body of the one-round protocols: pre-check, scan, adjudicate, and
// punish any ruling against Alice with full disclosure.
RunResult run_single_round(const Instance& instance, const AliceStrategy& alice,
                           const HypothesisOracle& oracle, const BobStrategy& bob,
                           bool robust, std::size_t slack) {
    ProtocolRun run(instance, oracle, bob);
    run.set_rounds(1);
    if (instance.size() == 0) {
        run.round_clean(1);
        return finish(instance, run);
    }
    run.set_report(alice_report(instance, alice));
    if (robust && slack > oracle.slack_cap()) {
        throw std::domain_error("run_robust: slack exceeds the oracle's cap");
    }
    try {
        if (!run.precheck(1, robust, slack)) {
            run.full_disclose(1, "report_unrealizable");
            return finish(instance, run);
        }
        const std::vector<std::size_t> against = run.round_core(1, robust, slack, {});
        if (!against.empty()) {
            run.full_disclose(1, "court_ruled_against_alice");
        } else {
            run.round_clean(1);
        }
    } catch (const std::runtime_error& ex) {
        run.fail(1, std::string("oracle: ") + ex.what());
    }
    return finish(instance, run);
}

}  // namespace

RunResult run_realizable(const Instance& instance, const AliceStrategy& alice,
                         const HypothesisOracle& oracle, const BobStrategy& bob) {
    return run_single_round(instance, alice, oracle, bob, false, 0);
}

RunResult run_robust(const Instance& instance, const AliceStrategy& alice,
                     const HypothesisOracle& oracle, std::size_t slack,
                     const BobStrategy& bob) {
    return run_single_round(instance, alice, oracle, bob, true, slack);
}

RunResult run_error_tolerant(const Instance& instance, const AliceStrategy& alice,
                             const HypothesisOracle& oracle,
                             const ErrorTolerantConfig& config, const BobStrategy& bob) {
    ProtocolRun run(instance, oracle, bob);
    if (instance.size() == 0) {
        run.set_rounds(1);
        run.round_clean(1);
        return finish(instance, run);
    }
    if (config.robust && config.slack > oracle.slack_cap()) {
        throw std::domain_error("run_error_tolerant: slack exceeds the oracle's cap");
    }
    run.set_report(alice_report(instance, alice));

    const std::size_t cap = config.round_cap ? config.round_cap : 1 + instance.size();
    std::size_t round = 1;
    try {
        for (;; ++round) {
            if (round > cap) {
                run.set_rounds(cap);
                run.fail(cap, "round cap exceeded");
                return finish(instance, run);
            }
            run.set_rounds(round);
            // The verified-negative scan variant only exists for the exact
            // setting; robust rounds rescan from scratch.
            std::vector<std::size_t> verified;
            if (!config.robust && round >= 2) verified = run.verified_negatives();
            const std::vector<std::size_t> against =
                run.round_core(round, config.robust, config.robust ? config.slack : 0,
                               std::move(verified));
            if (against.empty()) {
                run.round_clean(round);
                break;
            }
            run.relabel_truthfully(round, against);
        }
    } catch (const std::runtime_error& ex) {
        run.fail(round, std::string("oracle: ") + ex.what());
    }
    return finish(instance, run);
}

LowerBoundWitness lower_bound_witness(const std::vector<Vec>& points,
                                      const HypothesisOracle& oracle) {
    LowerBoundWitness w;
    if (points.empty()) return w;
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
    const LooResult loo = loo_dimension_lazy(points.size(), pred);
    w.loo_k = loo.k;
    if (loo.k <= 1) return w;
    w.dropped = loo.witness.front();
    w.x_prime.assign(loo.witness.begin() + 1, loo.witness.end());
    return w;
}

bool verify_lower_bound(const std::vector<Vec>& points, const LowerBoundWitness& witness,
                        const HypothesisOracle& oracle) {
    for (std::size_t i : witness.x_prime) {
        if (i >= points.size()) return false;
    }
    for (std::size_t isolated : witness.x_prime) {
        LabeledSet q;
        q.points.push_back(points[isolated]);
        q.labels.push_back(1);
        for (std::size_t other : witness.x_prime) {
            if (other == isolated) continue;
            q.points.push_back(points[other]);
            q.labels.push_back(-1);
        }
        if (!oracle.membership(q).realizable) return false;
    }
    return true;
}

}  // namespace edv
