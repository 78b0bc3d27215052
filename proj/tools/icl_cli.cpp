#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "icl/cli.hpp"

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("ICL_SEED")) return std::strtoull(env, nullptr, 10);
    return 42;
}

int run(int argc, char** argv) {
    CLI::App app{"isotonic conditional laws on finite probability spaces"};
    app.require_subcommand(1);

    icl::FitOptions fit_opt;
    std::string fit_order = "componentwise";
    auto* fit = app.add_subcommand("fit", "fit the conditional law of y given the covariate order");
    fit->add_option("input", fit_opt.input, "CSV file with covariates and a 'y' column")->required();
    fit->add_option("--order", fit_order, "componentwise | column:<i> | file:<edge list>");
    fit->add_option("--weights", fit_opt.weight_column, "weight column name");
    fit->add_option("--out", fit_opt.out, "write the JSON report here");

    icl::ScoreOptions score_opt;
    auto* score = app.add_subcommand("score", "score a fitted law against the data");
    score->add_option("input", score_opt.input, "CSV file")->required();
    score->add_option("fit", score_opt.fit_path, "fit report JSON")->required();
    score->add_option("--weights", score_opt.weight_column, "weight column name");
    score->add_option("--out", score_opt.out, "write the JSON report here");

    icl::CalibrateOptions cal_opt;
    auto* calibrate = app.add_subcommand("calibrate", "run the calibration checks on a forecast");
    calibrate->add_option("input", cal_opt.input, "CSV file")->required();
    calibrate->add_option("forecast", cal_opt.forecast_path, "forecast report JSON")->required();
    calibrate->add_option("--weights", cal_opt.weight_column, "weight column name");
    calibrate->add_option("--out", cal_opt.out, "write the JSON report here");

    icl::VerifyOptions ver_opt;
    ver_opt.seed = default_seed();
    auto* verify = app.add_subcommand("verify", "run a randomized verification suite");
    verify->add_option("--suite", ver_opt.suite, "universality | hierarchy | oracle | counterexamples")
        ->required();
    verify->add_option("--seed", ver_opt.seed, "seed (default: ICL_SEED env or 42)");
    verify->add_option("--n", ver_opt.max_atoms, "maximum atoms per random instance");
    verify->add_option("--fixtures", ver_opt.fixtures_dir, "replay frozen counterexample fixtures");
    verify->add_option("--out", ver_opt.out, "write the JSON report here");

    CLI11_PARSE(app, argc, argv);

    icl::Json report;
    int code = icl::kExitOk;
    std::string out_path;
    if (fit->parsed()) {
        fit_opt.order = icl::OrderSpec::parse(fit_order);
        code = icl::cmd_fit(fit_opt, report);
        out_path = fit_opt.out;
    } else if (score->parsed()) {
        code = icl::cmd_score(score_opt, report);
        out_path = score_opt.out;
    } else if (calibrate->parsed()) {
        code = icl::cmd_calibrate(cal_opt, report);
        out_path = cal_opt.out;
    } else if (verify->parsed()) {
        code = icl::cmd_verify(ver_opt, report);
        out_path = ver_opt.out;
    }
    std::cout << icl::emit_report(report, out_path);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return icl::kExitValidationError;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return icl::kExitValidationError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return icl::kExitParseError;
    }
}
