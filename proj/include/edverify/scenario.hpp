#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "edverify/formats.hpp"
#include "edverify/protocol.hpp"

namespace edv {

// A batch run description, parsed from a flat key-value file. One `seed`
// drives every random choice through split streams, so a scenario file fully
// determines its outputs.
struct Scenario {
    enum class Generator { MarginThird, SmallMargin, RandomSeparable, ExplicitFile };
    enum class ClassKind { LinearMargin, Finite };
    enum class Mode { Realizable, Robust, ErrorTolerant };

    int version = 1;
    Generator generator = Generator::RandomSeparable;
    std::size_t n = 0;       // margin_third family size / random instance size
    std::size_t d = 0;       // ambient dimension for random generators
    std::size_t k = 0;       // small_margin target family size
    double gamma = 0.0;      // generator margin
    std::string path;        // explicit_file instance source

    ClassKind cls = ClassKind::LinearMargin;
    double class_gamma = 0.0;
    std::string class_path;  // finite class file

    AliceStrategy strategy;  // random_errors seeds derive from `seed`
    Mode mode = Mode::Realizable;
    std::size_t slack = 0;       // robust mode
    bool inner_robust = false;   // error_tolerant inner flavor

    std::uint64_t seed = 0;
    std::string output;  // optional report base name (default "scenario")
};

// Parses the key-value text ('#' comments allowed). Unknown keys, missing
// required keys, or out-of-range values throw std::invalid_argument.
Scenario parse_scenario(const std::string& text);

struct ScenarioOutcome {
    Instance instance;
    RunResult run;
    Summary summary;
    std::string summary_path;
    std::string event_log_path;
    bool passed = false;
};

// Builds the instance and oracle, executes the requested mode, evaluates the
// built-in invariant checks, and writes "<base>-summary.txt" and
// "<base>-events.log" under out_dir. `passed` mirrors the summary's
// invariants field and is the CLI's exit status source.
ScenarioOutcome run_scenario(const Scenario& scenario, const std::string& out_dir);

struct SweepCell {
    double gamma = 0.0;
    std::uint64_t seed = 0;
    std::string regime;       // "bounded", "linear", or "exponential"
    std::string family_size;  // constructed size, or "-" where nothing is built
    std::string disclosure;
    std::string bound;        // closed-form ceiling, "Omega(d)", or "-"
    std::string status;       // "ok" or an error note
};

struct SweepResult {
    std::vector<SweepCell> cells;
    std::string table;       // header + one row per cell
    std::string table_path;
    bool all_ok = false;
};

// One row per (gamma, seed): gamma > 1/3 runs the protocol on a random
// margin-gamma instance against the closed-form ceiling; gamma = 1/3 runs the
// d-1 point hard family; gamma < 1/3 builds a skew-obtuse family of size
// target_k and scans it. Cells run concurrently; failures are recorded in the
// row and the sweep continues. Writes "sweep.txt" under out_dir.
SweepResult sweep_trichotomy(const std::vector<double>& gammas, std::size_t d,
                             const std::vector<std::uint64_t>& seeds,
                             const std::string& out_dir, std::size_t n = 30,
                             std::size_t target_k = 30);

}  // namespace edv
