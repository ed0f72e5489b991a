#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edverify/critical.hpp"
#include "edverify/dimension.hpp"
#include "edverify/geometry.hpp"
#include "edverify/hypothesis.hpp"
#include "edverify/protocol.hpp"

namespace edv {

// Plain-text round-trip formats. Every *_from_text throws std::invalid_argument
// with a line diagnostic on malformed input; floating-point values are written
// with enough digits to reproduce the exact double.

// Header "k d gamma slack", then k point lines and k witness lines, one
// space-separated vector per line.
std::string family_to_text(const VectorFamily& family);
VectorFamily family_from_text(const std::string& text);

// "ground" line listing the element ids, then one "set" line per set.
std::string system_to_text(const SetSystem& sys);
SetSystem system_from_text(const std::string& text);

// Header "universe n d", n point lines, "hypotheses m", m label rows.
std::string finite_class_to_text(const FiniteClass& cls);
FiniteClass finite_class_from_text(const std::string& text);

// Header "instance n d", then one "<id> <label> <coords...>" line per document.
std::string instance_to_text(const Instance& instance);
Instance instance_from_text(const std::string& text);

// Audit trace of a critical scan: one "step,point,verdict,margin" row per
// scanned document (margin blank when the verdict carries none).
std::string removal_log_to_csv(const CriticalResult& result, const std::vector<DocId>& ids);

// One event per line: "<round> <kind> <comma-joined ids or -> <note or ->".
std::string event_log_to_text(const Transcript& transcript);

// The per-run record consumed by reports and the determinism checks. Field
// order is fixed; absent optionals print as "n/a".
struct Summary {
    double recall = 1.0;
    std::size_t disclosure = 0;
    std::size_t detected_errors = 0;
    std::size_t oracle_calls = 0;
    std::size_t rounds = 0;
    std::optional<double> k_bound;          // closed-form ceiling when one applies
    std::optional<std::size_t> loo_dimension;  // exact value when computable
    bool invariants_pass = true;
    std::vector<std::string> failures;  // human-readable invariant violations
};

std::string summary_to_text(const Summary& summary);

// Whole-file helpers; throw std::runtime_error on I/O failure.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace edv
