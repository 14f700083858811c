#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "dorlicz/extremal.hpp"

namespace dorlicz {

/// Exact checks must hold up to their tolerance; monitor comparisons only
/// record margins (constant-c inequalities, statements outside hypotheses).
enum class CheckMode { Exact, Monitor };
enum class Relation { Leq, Geq, Eq };

std::string to_string(CheckMode m);
std::string to_string(Relation r);

struct CheckSpec {
    std::string id;
    int number = 0;
    /// The statement the predicate encodes, in words.
    std::string statement;
    /// Generated inputs: body kinds, functions, dimension.
    std::string inputs;
    CheckMode mode = CheckMode::Exact;
    /// Default relative tolerance for optimizer or quadrature comparisons.
    /// Comparisons that are exact discrete identities use kExactTolerance.
    double tolerance = 3e-2;
    /// Why every exact comparison is sound despite the symmetric-candidate
    /// bias of the estimates.
    std::string soundness;
};

inline constexpr double kExactTolerance = 1e-12;

/// All 22 checks, ordered by number. Ids are unique.
const std::vector<CheckSpec>& check_registry();
/// Throws ConfigError for an unknown id.
const CheckSpec& find_check(const std::string& id);

/// One comparison A (relation) B inside a trial.
struct TrialRecord {
    std::string check_id;
    std::uint64_t seed = 0;
    int trial = 0;
    std::string label;
    Relation relation = Relation::Leq;
    double lhs = 0.0;
    double rhs = 0.0;
    /// A <= B: (B - A)/|B|; A >= B: (A - B)/|B|; A = B: -|A - B|/|B|.
    double margin = 0.0;
    double tolerance = 0.0;
    CheckMode mode = CheckMode::Exact;
    /// pass, fail, recorded (monitor) or error.
    std::string verdict;
    std::string input_digest;
    std::string error;
};

struct Failure {
    std::string input_digest;
    std::string label;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
};

struct CheckReport {
    std::string check_id;
    int number = 0;
    CheckMode mode = CheckMode::Exact;
    double tolerance = 0.0;
    int trials = 0;
    std::vector<TrialRecord> records;
    std::vector<Failure> failures;
    /// Smallest margin over exact comparisons; +inf when there are none.
    double min_margin = 0.0;
    /// Smallest margin over monitor comparisons; +inf when there are none.
    double monitor_min_margin = 0.0;
    int monitor_records = 0;
    int erroring_trials = 0;
    /// pass or fail for exact checks; recorded for monitor checks.
    std::string verdict;
};

/// Reduced search used by verification trials.
SearchOptions quick_search();

struct VerifyOptions {
    int trials = 100;
    std::uint64_t seed = 1;
    /// Nodes of the uniform-angle circle grid; checks run at n = 2.
    int resolution = 512;
    /// Search settings for every estimate made by a check.
    SearchOptions search = quick_search();
    /// Overrides the declared tolerance of optimizer/quadrature comparisons.
    double tolerance_override = 0.0;
};

/// Runs `options.trials` trials of one check. Trial t uses the seed
/// mix_seed(options.seed, 1000 * number + t), so reports do not depend on
/// which other checks run.
CheckReport run_check(const CheckSpec& check, const VerifyOptions& options);
std::vector<CheckReport> run_checks(const std::vector<std::string>& ids, const VerifyOptions& options);

/// Header plus one row per comparison, ordered by check then trial.
void write_trials_csv(std::ostream& out, const std::vector<CheckReport>& reports);
nlohmann::json summary_json(const std::vector<CheckReport>& reports);
/// Margin under the convention of TrialRecord::margin.
double relative_margin(Relation relation, double lhs, double rhs);

}  // namespace dorlicz
