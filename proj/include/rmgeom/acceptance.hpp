#pragma once

#include "rmgeom/lattice.hpp"
#include "rmgeom/records.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace rmgeom {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool checks_pass = false;
    double seconds = 0;
    double budget_seconds = 0;  // 0: no time limit
    bool timed = true;          // false: wall time is neither recorded nor judged
    Json detail = Json::object();

    bool within_budget() const { return !timed || budget_seconds == 0 || seconds < budget_seconds; }
    bool pass() const { return checks_pass && within_budget(); }
};

struct AcceptanceOptions {
    std::uint64_t seed = 0;
    bool timing = true;
    int workers = 0;               // 0 keeps the current worker count
    std::vector<int> only;         // empty: every criterion
};

// Exact checks modulo Z with theta = omega of Q(sqrt d), `cases` seeded samples
// per identity.  The plain cocycle is tried in two gauges; the twisted cocycle
// and SL2 invariance use the symmetric one.
std::vector<CheckRecord> cocycle_checks(std::int64_t d, int cases, std::mt19937_64& rng);

// Spectral modes against shimizu_terms (norm multiset and representatives)
// and the s = 3 partial sums.
std::vector<CheckRecord> shimizu_checks(const RealLattice& L, double X);

// Criteria 1 to 10.  Each runs under its own seeded generator, so the
// records do not depend on the order or selection of criteria.
std::vector<CriterionResult> run_criteria(const AcceptanceOptions& opt);

// Criterion 11: criteria 1 to 10 again with a different worker count, and
// the serialized records of both runs compared byte for byte.
CriterionResult determinism_criterion(const AcceptanceOptions& opt, const std::vector<CriterionResult>& first);

// Full suite, 1 to 11.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

// The record written by `verify`; wall times only when timed.
Json criterion_json(const CriterionResult& c);

// "  7 FAIL  Levy's lemma ... (12.3 s / 60 s)"
std::string criterion_line(const CriterionResult& c);

}  // namespace rmgeom
