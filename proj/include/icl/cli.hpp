#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "icl/calibration.hpp"
#include "icl/icl_fit.hpp"
#include "icl/oracle.hpp"
#include "icl/space.hpp"

namespace icl {

inline constexpr const char* kSchemaTag = "icl/1";
inline constexpr const char* kLibraryVersion = "0.1.0";

// exit codes shared by the CLI
inline constexpr int kExitOk = 0;
inline constexpr int kExitParseError = 2;
inline constexpr int kExitValidationError = 3;
inline constexpr int kExitVerifyFailure = 4;

/// Parsed CSV input: covariate columns, response column "y", optional weight
/// column (normalized to sum one).
struct Dataset {
    std::vector<std::string> covariate_names;
    CovariateTable covariates;
    std::vector<double> y;
    std::vector<double> weights;  // normalized

    FiniteSpace space() const;
};

/// Throws std::runtime_error on malformed CSV, std::invalid_argument on
/// validation problems (missing y column, missing values, bad weights).
Dataset load_csv(const std::string& path, const std::string& weight_column = "");

/// Order sources accepted by the CLI: componentwise (default), a single
/// column index, or an explicit edge-list file.
struct OrderSpec {
    enum class Kind { componentwise, column, file } kind = Kind::componentwise;
    int column = 0;
    std::string path;

    static OrderSpec parse(const std::string& text);  // throws on bad syntax
    std::string describe() const;
};

Preorder build_order(const Dataset& data, const OrderSpec& spec);

using Json = nlohmann::ordered_json;

Json step_cdf_to_json(const StepCdf& f);
StepCdf step_cdf_from_json(const Json& j);
Json preorder_to_json(const Preorder& order);
Preorder preorder_from_json(const Json& j);
Json instance_to_json(const CounterexampleInstance& instance);
CounterexampleInstance instance_from_json(const Json& j);
Json fit_to_json(const IclFit& fit);

/// Rebuilds the per-atom forecast profile from a fit report ("fit" block).
ForecastProfile profile_from_fit_json(const Json& fit_json, const FiniteSpace& space,
                                      const std::vector<double>& y);

struct FitOptions {
    std::string input;
    OrderSpec order;
    std::string weight_column;
    std::string out;  // empty: stdout only
};

struct ScoreOptions {
    std::string input;
    std::string fit_path;
    std::string weight_column;
    std::string out;
};

struct CalibrateOptions {
    std::string input;
    std::string forecast_path;
    std::string weight_column;
    std::string out;
};

struct VerifyOptions {
    std::string suite;  // universality | hierarchy | oracle | counterexamples
    std::uint64_t seed = 42;
    int max_atoms = 6;
    std::string fixtures_dir;  // counterexamples: replay against these
    std::string out;
};

int cmd_fit(const FitOptions& opt, Json& report);
int cmd_score(const ScoreOptions& opt, Json& report);
int cmd_calibrate(const CalibrateOptions& opt, Json& report);
int cmd_verify(const VerifyOptions& opt, Json& report);

/// Writes the report to opt.out if set, always returns the serialized text.
std::string emit_report(const Json& report, const std::string& out_path);

}  // namespace icl
