#include "edverify/formats.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace edv {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_fixed(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

[[noreturn]] void bad_line(const std::string& what, std::size_t line_no) {
    throw std::invalid_argument(what + " (line " + std::to_string(line_no) + ")");
}

// Lines with comments stripped, keeping 1-based line numbers for diagnostics.
std::vector<std::pair<std::size_t, std::string>> content_lines(const std::string& text) {
    std::vector<std::pair<std::size_t, std::string>> out;
    std::istringstream in(text);
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream probe(line);
        std::string token;
        if (probe >> token) out.emplace_back(no, line);
    }
    return out;
}

double parse_double(const std::string& tok, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        bad_line("expected a number, got '" + tok + "'", line_no);
    }
}

long long parse_int(const std::string& tok, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(tok, &used);
        if (used != tok.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        bad_line("expected an integer, got '" + tok + "'", line_no);
    }
}

Vec parse_vector(const std::string& line, std::size_t dim, std::size_t line_no) {
    std::istringstream in(line);
    Vec v;
    std::string tok;
    while (in >> tok) v.push_back(parse_double(tok, line_no));
    if (v.size() != dim) {
        bad_line("expected " + std::to_string(dim) + " coordinates, got " +
                     std::to_string(v.size()),
                 line_no);
    }
    return v;
}

std::string join_vector(const Vec& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += fmt_double(v[i]);
    }
    return out;
}

}  // namespace

std::string family_to_text(const VectorFamily& family) {
    std::string out = std::to_string(family.size()) + ' ' + std::to_string(family.dim()) +
                      ' ' + fmt_double(family.gamma) + ' ' + std::to_string(family.slack) +
                      '\n';
    for (const Vec& p : family.points) out += join_vector(p) + '\n';
    for (const Vec& w : family.witnesses) out += join_vector(w) + '\n';
    return out;
}

VectorFamily family_from_text(const std::string& text) {
    const auto lines = content_lines(text);
    if (lines.empty()) throw std::invalid_argument("family text: missing header");
    std::istringstream head(lines[0].second);
    std::string k_tok, d_tok, gamma_tok, slack_tok;
    if (!(head >> k_tok >> d_tok >> gamma_tok >> slack_tok)) {
        bad_line("family header must be 'k d gamma slack'", lines[0].first);
    }
    const auto k = static_cast<std::size_t>(parse_int(k_tok, lines[0].first));
    const auto d = static_cast<std::size_t>(parse_int(d_tok, lines[0].first));
    VectorFamily family;
    family.gamma = parse_double(gamma_tok, lines[0].first);
    family.slack = static_cast<std::size_t>(parse_int(slack_tok, lines[0].first));
    if (lines.size() != 1 + 2 * k) {
        throw std::invalid_argument("family text: expected " + std::to_string(2 * k) +
                                    " vector lines, got " + std::to_string(lines.size() - 1));
    }
    for (std::size_t i = 0; i < k; ++i) {
        family.points.push_back(parse_vector(lines[1 + i].second, d, lines[1 + i].first));
    }
    for (std::size_t i = 0; i < k; ++i) {
        family.witnesses.push_back(
            parse_vector(lines[1 + k + i].second, d, lines[1 + k + i].first));
    }
    validate_family(family);
    return family;
}

std::string system_to_text(const SetSystem& sys) {
    std::string out = "ground";
    for (const std::string& id : sys.ground) out += ' ' + id;
    out += '\n';
    for (const auto& set : sys.sets) {
        out += "set";
        for (std::size_t i : set) out += ' ' + sys.ground[i];
        out += '\n';
    }
    return out;
}

SetSystem system_from_text(const std::string& text) {
    const auto lines = content_lines(text);
    if (lines.empty()) throw std::invalid_argument("system text: missing ground line");
    SetSystem sys;
    std::istringstream ground(lines[0].second);
    std::string tok;
    ground >> tok;
    if (tok != "ground") bad_line("system text must start with 'ground'", lines[0].first);
    while (ground >> tok) sys.ground.push_back(tok);

    const auto index_of = [&](const std::string& id, std::size_t line_no) {
        for (std::size_t i = 0; i < sys.ground.size(); ++i) {
            if (sys.ground[i] == id) return i;
        }
        bad_line("unknown ground element '" + id + "'", line_no);
    };

    for (std::size_t l = 1; l < lines.size(); ++l) {
        std::istringstream in(lines[l].second);
        in >> tok;
        if (tok != "set") bad_line("expected a 'set' line", lines[l].first);
        std::vector<std::size_t> set;
        while (in >> tok) set.push_back(index_of(tok, lines[l].first));
        sys.sets.push_back(std::move(set));
    }
    validate_system(sys);
    return sys;
}

std::string finite_class_to_text(const FiniteClass& cls) {
    const std::size_t d = cls.universe.empty() ? 0 : cls.universe.front().size();
    std::string out = "universe " + std::to_string(cls.universe.size()) + ' ' +
                      std::to_string(d) + '\n';
    for (const Vec& p : cls.universe) out += join_vector(p) + '\n';
    out += "hypotheses " + std::to_string(cls.hypotheses.size()) + '\n';
    for (const auto& h : cls.hypotheses) {
        std::string row;
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (i) row += ' ';
            row += std::to_string(h[i]);
        }
        out += row + '\n';
    }
    return out;
}

FiniteClass finite_class_from_text(const std::string& text) {
    const auto lines = content_lines(text);
    if (lines.empty()) throw std::invalid_argument("finite class text: missing header");
    std::istringstream head(lines[0].second);
    std::string tok, n_tok, d_tok;
    head >> tok;
    if (tok != "universe" || !(head >> n_tok >> d_tok)) {
        bad_line("finite class header must be 'universe n d'", lines[0].first);
    }
    const auto n = static_cast<std::size_t>(parse_int(n_tok, lines[0].first));
    const auto d = static_cast<std::size_t>(parse_int(d_tok, lines[0].first));
    if (lines.size() < 2 + n) throw std::invalid_argument("finite class text: truncated");

    FiniteClass cls;
    for (std::size_t i = 0; i < n; ++i) {
        cls.universe.push_back(parse_vector(lines[1 + i].second, d, lines[1 + i].first));
    }
    std::istringstream hyp_head(lines[1 + n].second);
    std::string m_tok;
    hyp_head >> tok;
    if (tok != "hypotheses" || !(hyp_head >> m_tok)) {
        bad_line("expected 'hypotheses m'", lines[1 + n].first);
    }
    const auto m = static_cast<std::size_t>(parse_int(m_tok, lines[1 + n].first));
    if (lines.size() != 2 + n + m) {
        throw std::invalid_argument("finite class text: expected " + std::to_string(m) +
                                    " hypothesis rows");
    }
    for (std::size_t h = 0; h < m; ++h) {
        const auto& [line_no, line] = lines[2 + n + h];
        std::istringstream in(line);
        std::vector<int> labels;
        while (in >> tok) labels.push_back(static_cast<int>(parse_int(tok, line_no)));
        if (labels.size() != n) bad_line("hypothesis row length mismatch", line_no);
        cls.hypotheses.push_back(std::move(labels));
    }
    validate_finite_class(cls);
    return cls;
}

std::string instance_to_text(const Instance& instance) {
    const std::size_t d =
        instance.documents.empty() ? 0 : instance.documents.front().point.size();
    std::string out = "instance " + std::to_string(instance.size()) + ' ' +
                      std::to_string(d) + '\n';
    for (const Document& doc : instance.documents) {
        out += doc.id + ' ' + std::to_string(doc.true_label) + ' ' + join_vector(doc.point) +
               '\n';
    }
    return out;
}

Instance instance_from_text(const std::string& text) {
    const auto lines = content_lines(text);
    if (lines.empty()) throw std::invalid_argument("instance text: missing header");
    std::istringstream head(lines[0].second);
    std::string tok, n_tok, d_tok;
    head >> tok;
    if (tok != "instance" || !(head >> n_tok >> d_tok)) {
        bad_line("instance header must be 'instance n d'", lines[0].first);
    }
    const auto n = static_cast<std::size_t>(parse_int(n_tok, lines[0].first));
    const auto d = static_cast<std::size_t>(parse_int(d_tok, lines[0].first));
    if (lines.size() != 1 + n) {
        throw std::invalid_argument("instance text: expected " + std::to_string(n) +
                                    " document lines");
    }
    Instance inst;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& [line_no, line] = lines[1 + i];
        std::istringstream in(line);
        Document doc;
        std::string label_tok;
        if (!(in >> doc.id >> label_tok)) bad_line("expected '<id> <label> <coords>'", line_no);
        doc.true_label = static_cast<int>(parse_int(label_tok, line_no));
        std::string rest;
        std::getline(in, rest);
        doc.point = parse_vector(rest, d, line_no);
        inst.documents.push_back(std::move(doc));
    }
    validate_instance(inst);
    return inst;
}

std::string removal_log_to_csv(const CriticalResult& result, const std::vector<DocId>& ids) {
    std::string out = "step,point,verdict,margin\n";
    for (std::size_t s = 0; s < result.removal_log.size(); ++s) {
        const ScanStep& step = result.removal_log[s];
        if (step.index >= ids.size()) {
            throw std::invalid_argument("removal_log_to_csv: id list too short");
        }
        out += std::to_string(s) + ',' + ids[step.index] + ',' +
               (step.removed ? "removed" : "kept") + ',';
        if (step.verdict.achieved_margin) out += fmt_double(*step.verdict.achieved_margin);
        out += '\n';
    }
    return out;
}

std::string event_log_to_text(const Transcript& transcript) {
    std::string out;
    for (const Event& e : transcript.events) {
        out += std::to_string(e.round);
        out += ' ';
        out += event_kind_name(e.kind);
        out += ' ';
        if (e.ids.empty()) {
            out += '-';
        } else {
            for (std::size_t i = 0; i < e.ids.size(); ++i) {
                if (i) out += ',';
                out += e.ids[i];
            }
        }
        out += ' ';
        out += e.note.empty() ? "-" : e.note;
        out += '\n';
    }
    return out;
}

std::string summary_to_text(const Summary& summary) {
    std::string out;
    out += "recall " + fmt_fixed(summary.recall) + '\n';
    out += "disclosure " + std::to_string(summary.disclosure) + '\n';
    out += "detected_errors " + std::to_string(summary.detected_errors) + '\n';
    out += "oracle_calls " + std::to_string(summary.oracle_calls) + '\n';
    out += "rounds " + std::to_string(summary.rounds) + '\n';
    out += "k_bound " + (summary.k_bound ? fmt_fixed(*summary.k_bound) : std::string("n/a")) +
           '\n';
    out += "loo_dimension " +
           (summary.loo_dimension ? std::to_string(*summary.loo_dimension)
                                  : std::string("n/a")) +
           '\n';
    out += "invariants " + std::string(summary.invariants_pass ? "pass" : "fail") + '\n';
    for (const std::string& f : summary.failures) out += "failure " + f + '\n';
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace edv
