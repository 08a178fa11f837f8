#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmatch/line_analysis.hpp"
#include "rmatch/rm_engine.hpp"

namespace rmatch {

enum class CheckStatus { Pass, Fail, Skipped };

const char* to_string(CheckStatus s);

/// First counterexample found by a check.
struct Witness {
    std::string lhs;
    std::string rhs;
    int phase = -1;
    std::string interval;
    std::string detail;
};

struct CheckResult {
    std::string name;
    std::string statement;
    CheckStatus status = CheckStatus::Pass;
    long evaluated = 0;  // number of instances of the statement tested
    std::optional<Witness> witness;
};

class VerificationReport {
public:
    std::vector<CheckResult> checks;

    bool passed() const;
    const CheckResult* find(const std::string& name) const;
    std::vector<std::string> failures() const;
    void append(VerificationReport other);

    nlohmann::json to_json() const;
};

/// Exhaustive minimum over simple alternating paths from r to a free server
/// with respect to the offline matching in `server_mate`; ties go to fewer
/// edges, then the smaller terminal index. Throws std::invalid_argument when
/// the instance has more than 16 points.
AugmentingPath<Rational> brute_force_min_path(const Instance& instance, const std::vector<int>& server_mate,
                                              RequestIndex r, const Rational& t);

/// Replays every phase of the trace against brute_force_min_path. Skipped for
/// n > 7.
VerificationReport check_oracle_replay(const RunTrace<Rational>& trace);

/// Feasibility, sign and root-dual invariants at both snapshots of every
/// phase, path eligibility, equal server sets of the two matchings, and the
/// online cost identity.
VerificationReport check_invariants(const RunTrace<Rational>& trace);

struct LemmaOptions {
    MergePolicy policy = MergePolicy::Open;
};

/// Cost-split and nearest-free-server statements for any metric, plus the
/// full span / region / level / well-separation suite for line traces.
VerificationReport check_all_lemmas(const RunTrace<Rational>& trace, const LemmaOptions& options = {});

struct RatioResult {
    Rational w_online;
    Rational w_opt;
    Rational ratio;      // 1 when both costs are 0
    double normalized;   // ratio / (1 + log2 n)
};

/// Throws std::domain_error if the optimum is 0 but the online cost is not.
RatioResult final_ratio_check(const RunTrace<Rational>& trace);

/// Optimal offline cost for either metric.
Rational optimal_cost(const Instance& instance);

struct VerifyOptions {
    LemmaOptions lemmas;
    bool oracle_replay = true;
};

/// Invariants, lemmas and (for n <= 7) the oracle replay in one report.
VerificationReport verify_trace(const RunTrace<Rational>& trace, const VerifyOptions& options = {});

/// JSON document for the verify command: instance summary, costs, ratio,
/// every check, and the line analysis summary when available.
nlohmann::json verification_document(const RunTrace<Rational>& trace, const VerificationReport& report,
                                     const LemmaOptions& options = {});

}  // namespace rmatch
