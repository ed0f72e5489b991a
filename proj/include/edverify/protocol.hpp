#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "edverify/hypothesis.hpp"
#include "edverify/vecmath.hpp"

namespace edv {

// ---------------------------------------------------------------------------
// The cast. Alice holds the documents and reports labels; Trent (this code)
// computes which of her negatives must be checked; Bob labels what he is
// sent; the court settles disagreements by ground truth. A document revealed
// to Bob stays revealed: disclosure accounting is per unique document.
// ---------------------------------------------------------------------------

using DocId = std::string;

struct Document {
    DocId id;
    Vec point;
    int true_label = -1;  // +1 responsive, -1 nonresponsive
};

struct Instance {
    std::vector<Document> documents;

    std::size_t size() const { return documents.size(); }
    std::size_t n_plus() const;
    // Index of an id; std::invalid_argument when absent.
    std::size_t index_of(const DocId& id) const;
};

// Unique ids, labels in {+1, -1}, finite points of a common dimension.
// Throws std::invalid_argument.
void validate_instance(const Instance& instance);

// How Alice deviates (or not) from the truth in her initial report. On any
// detected misclassification she always corrects that document to its true
// label; only the initial report varies.
struct AliceStrategy {
    enum class Kind { Truthful, HidePositives, FlipSet, RandomErrors };

    Kind kind = Kind::Truthful;
    std::vector<DocId> ids;       // HidePositives / FlipSet targets
    std::size_t error_count = 0;  // RandomErrors
    std::uint64_t seed = 0;       // RandomErrors

    static AliceStrategy truthful();
    // Labels the listed documents negative; each must be a true positive.
    static AliceStrategy hide_positives(std::vector<DocId> ids);
    // Reports the opposite of the true label on the listed documents.
    static AliceStrategy flip_set(std::vector<DocId> ids);
    // Flips `count` documents chosen without replacement by a seeded draw.
    static AliceStrategy random_errors(std::size_t count, std::uint64_t seed);
};

// Initial report induced by a strategy: the +1/-1 labels Alice files, indexed
// like instance.documents. Throws std::invalid_argument for unknown ids, a
// hide target that is not a true positive, or error_count > |X|.
std::vector<int> alice_report(const Instance& instance, const AliceStrategy& alice);

// Bob labels faithfully except on dispute_ids, where he reports the flipped
// label. The false-dispute variant exists to show that adjudications Alice
// wins do not corrupt the disclosure accounting.
struct BobStrategy {
    std::vector<DocId> dispute_ids;

    static BobStrategy faithful();
    static BobStrategy false_disputes(std::vector<DocId> ids);
};

// ---------------------------------------------------------------------------
// Transcript: everything observable about one run.
// ---------------------------------------------------------------------------

enum class EventKind {
    AliceReport,     // ids = documents reported positive
    Precheck,        // note = "pass" or "fail"
    CriticalSet,     // ids = scan survivors (including carried verified negatives)
    SendToBob,       // ids = documents sent this round
    Disputes,        // ids = documents where Alice's and Bob's labels differ
    CourtRuling,     // ids = {document}, note = "against_alice" or "for_alice"
    Relabel,         // ids = documents Alice corrects (error-tolerant rounds)
    FullDisclosure,  // ids = every document, note = trigger reason
    Failure,         // note = diagnostic (oracle error or round cap exceeded)
    RoundClean,      // a round ended with no ruling against Alice
};

const char* event_kind_name(EventKind kind);

struct Event {
    EventKind kind;
    std::size_t round = 1;  // 1-based protocol iteration
    std::vector<DocId> ids;
    std::string note;
};

struct Transcript {
    std::vector<Event> events;
    std::vector<DocId> disclosed;    // unique, in first-disclosure order
    std::vector<DocId> adjudicated;  // unique, in first-ruling order
    std::size_t detected_errors = 0;    // distinct documents ruled against Alice
    std::size_t court_rulings = 0;      // all rulings, including ones Alice wins
    std::size_t oracle_calls = 0;       // critical-scan queries across all rounds
    std::size_t precheck_calls = 0;     // report pre-check queries (counted apart)
    std::size_t rounds = 0;
    bool full_disclosure = false;
    bool aborted = false;  // oracle failure or cap; events end with a Failure event
};

struct Metrics {
    double recall = 1.0;  // vacuously 1 when the instance has no positives
    std::size_t nonresponsive_disclosure = 0;
};

// Recomputed from the transcript's disclosed set against ground truth.
Metrics compute_metrics(const Instance& instance, const Transcript& transcript);

struct RunResult {
    Transcript transcript;
    Metrics metrics;
};

// ---------------------------------------------------------------------------
// Protocol runs. Validation problems (bad instance, unknown ids, slack over
// the oracle's cap) throw; a std::runtime_error from the oracle mid-run is
// caught and produces an aborted transcript ending in a Failure event.
// ---------------------------------------------------------------------------

// One-round exact protocol. If Alice's report is not realizable in the class,
// everything is disclosed before any scan. Otherwise her negatives are
// scanned, her positives plus the surviving critical points go to Bob,
// disagreements are adjudicated, and any ruling against Alice discloses
// everything.
RunResult run_realizable(const Instance& instance, const AliceStrategy& alice,
                         const HypothesisOracle& oracle,
                         const BobStrategy& bob = BobStrategy::faithful());

// One-round robust protocol: the pre-check asks whether the report is
// classifiable with at most `slack` total errors, and the scan keeps a
// negative when some class member labels it positive with at most `slack`
// errors elsewhere.
RunResult run_robust(const Instance& instance, const AliceStrategy& alice,
                     const HypothesisOracle& oracle, std::size_t slack,
                     const BobStrategy& bob = BobStrategy::faithful());

struct ErrorTolerantConfig {
    bool robust = false;
    std::size_t slack = 0;         // robust scan slack when robust = true
    std::size_t round_cap = 0;     // 0 means 1 + |X|
};

// Theorem-style error-tolerant wrapper: rounds of (scan, send, adjudicate)
// where each ruling against Alice makes her correct that document, and the
// loop stops at the first round with no ruling against her. Detection never
// triggers full disclosure here - correction replaces punishment - so the
// unique disclosure stays near (rounds) * (per-round bound). Rounds after the
// first treat Bob's verified negatives as fixed negative constraints that are
// skipped by the scan. Exceeding the round cap aborts with a diagnostic
// transcript (unreachable under the fixed correction policy, which strictly
// shrinks Alice's error set each round).
RunResult run_error_tolerant(const Instance& instance, const AliceStrategy& alice,
                             const HypothesisOracle& oracle,
                             const ErrorTolerantConfig& config = {},
                             const BobStrategy& bob = BobStrategy::faithful());

// ---------------------------------------------------------------------------
// Lower-bound witness: the adversarial family showing the disclosure bound is
// tight. From a maximum isolation witness C of the class over `points`, drop
// the lowest-index member c and keep X' = C minus c under an all-negative
// ground truth. For each remaining c' the family contains the alternative
// truth h_{c'} labeling exactly c' positive inside X'; a verifier that skips
// any document of X' fails recall 1 against that document's family member.
// ---------------------------------------------------------------------------

struct LowerBoundWitness {
    std::vector<std::size_t> x_prime;  // indices into the original point set
    std::size_t dropped = 0;           // the removed witness member c
    std::size_t loo_k = 0;             // |C|, the isolation dimension found
};

// Computes C with the oracle-backed isolation search (point count capped at
// 24). Degenerate when loo_k <= 1: x_prime is empty.
LowerBoundWitness lower_bound_witness(const std::vector<Vec>& points,
                                      const HypothesisOracle& oracle);

// Re-checks that every family member is realizable: for each c' in x_prime,
// labeling c' positive and the rest of x_prime negative must be in the class.
bool verify_lower_bound(const std::vector<Vec>& points, const LowerBoundWitness& witness,
                        const HypothesisOracle& oracle);

}  // namespace edv
