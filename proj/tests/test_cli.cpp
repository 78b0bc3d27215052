#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>

#include "icl/calibration.hpp"
#include "icl/cli.hpp"

using namespace icl;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = std::string("/tmp/icl_test_") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

const std::string chain_csv = "x,y\n1,1\n2,0\n3,2\n";

Json fit_chain(const std::string& csv_path) {
    FitOptions opt;
    opt.input = csv_path;
    opt.order = OrderSpec::parse("componentwise");
    Json report;
    REQUIRE(cmd_fit(opt, report) == kExitOk);
    return report;
}

}  // namespace

TEST_CASE("fit on the three-row chain") {
    const auto report = fit_chain(write_temp("chain.csv", chain_csv));
    CHECK(report.at("schema") == kSchemaTag);
    const Json& fit = report.at("fit");
    CHECK(fit.at("n") == 3);
    CHECK(fit.at("thresholds") == Json::array({0.0, 1.0, 2.0}));
    const auto rows = fit.at("cdf").get<std::vector<std::vector<double>>>();
    CHECK(rows[0] == std::vector<double>{0.5, 1.0, 1.0});
    CHECK(rows[1] == std::vector<double>{0.5, 1.0, 1.0});
    CHECK(rows[2] == std::vector<double>{0.0, 0.0, 1.0});
    // the median curve is part of the quantile grid
    const auto levels = report.at("quantiles").at("levels").get<std::vector<double>>();
    const auto curves = report.at("quantiles").at("values").get<std::vector<std::vector<double>>>();
    bool found = false;
    for (std::size_t k = 0; k < levels.size(); ++k)
        if (levels[k] == 0.5) {
            CHECK(curves[k] == std::vector<double>{0, 0, 2});
            found = true;
        }
    CHECK(found);
}

TEST_CASE("fit on a single row is a point mass") {
    const auto report = fit_chain(write_temp("single.csv", "x,y\n4,7\n"));
    const auto rows = report.at("fit").at("cdf").get<std::vector<std::vector<double>>>();
    CHECK(rows == std::vector<std::vector<double>>{{1.0}});
}

TEST_CASE("fit on incomparable rows is empirical") {
    const auto report =
        fit_chain(write_temp("incomp.csv", "x1,x2,y\n0,1,3\n1,0,5\n"));
    const auto rows = report.at("fit").at("cdf").get<std::vector<std::vector<double>>>();
    CHECK(rows[0] == std::vector<double>{1.0, 1.0});
    CHECK(rows[1] == std::vector<double>{0.0, 1.0});
}

TEST_CASE("score on the chain fixture") {
    const std::string csv = write_temp("score_chain.csv", chain_csv);
    const std::string fit_path = write_temp("score_chain_fit.json", "");
    FitOptions fopt;
    fopt.input = csv;
    fopt.order = OrderSpec::parse("componentwise");
    fopt.out = fit_path;
    Json fit_report;
    REQUIRE(cmd_fit(fopt, fit_report) == kExitOk);
    emit_report(fit_report, fit_path);

    ScoreOptions sopt;
    sopt.input = csv;
    sopt.fit_path = fit_path;
    Json score_report;
    REQUIRE(cmd_score(sopt, score_report) == kExitOk);
    CHECK(score_report.at("scores").at("mean_crps").get<double>() ==
          doctest::Approx(1.0 / 6).epsilon(1e-12));
    CHECK(score_report.at("scores").at("mean_crps_quantile_form").get<double>() ==
          doctest::Approx(1.0 / 6).epsilon(1e-12));
}

TEST_CASE("score of perfect point masses is zero") {
    // pairwise incomparable rows, so the fit is the empirical point mass per row
    const std::string csv = write_temp("perfect.csv", "x1,x2,y\n0,2,0\n1,1,1\n2,0,2\n");
    Json fit_report;
    FitOptions fopt;
    fopt.input = csv;
    fopt.order = OrderSpec::parse("componentwise");
    REQUIRE(cmd_fit(fopt, fit_report) == kExitOk);
    const std::string fit_path = write_temp("perfect_fit.json", fit_report.dump());
    ScoreOptions sopt;
    sopt.input = csv;
    sopt.fit_path = fit_path;
    Json score_report;
    REQUIRE(cmd_score(sopt, score_report) == kExitOk);
    CHECK(score_report.at("scores").at("mean_crps").get<double>() == doctest::Approx(0.0));
}

TEST_CASE("score of the marginal on symmetric two-point data") {
    // both atoms forecast the marginal half-half law; hand value 0.5
    const std::string csv = write_temp("symmetric.csv", "x,y\n1,0\n1,2\n");
    Json forecast;
    forecast["n"] = 2;
    forecast["thresholds"] = Json::array({0.0, 2.0});
    forecast["cdf"] = Json::array({Json::array({0.5, 1.0}), Json::array({0.5, 1.0})});
    const std::string path = write_temp("symmetric_fit.json", forecast.dump());
    ScoreOptions sopt;
    sopt.input = csv;
    sopt.fit_path = path;
    Json report;
    REQUIRE(cmd_score(sopt, report) == kExitOk);
    CHECK(report.at("scores").at("mean_crps").get<double>() == doctest::Approx(0.5));
}

TEST_CASE("calibrate round-trips the library flags") {
    const std::string csv = write_temp("cal_chain.csv", chain_csv);
    Json fit_report;
    FitOptions fopt;
    fopt.input = csv;
    fopt.order = OrderSpec::parse("componentwise");
    REQUIRE(cmd_fit(fopt, fit_report) == kExitOk);
    const std::string fit_path = write_temp("cal_chain_fit.json", fit_report.dump());

    CalibrateOptions copt;
    copt.input = csv;
    copt.forecast_path = fit_path;
    Json report;
    REQUIRE(cmd_calibrate(copt, report) == kExitOk);
    const Json& c = report.at("calibration");
    CHECK(c.at("auto").at("ok") == true);
    CHECK(c.at("isotonic").at("ok") == true);
    CHECK(c.at("threshold").at("ok") == true);
    CHECK(c.at("quantile").at("ok") == true);
    CHECK(c.at("pit_bounds").at("ok") == true);
}

TEST_CASE("calibrate flags the frozen crossing-quad pattern") {
    // four two-point forecasts, threshold- and quantile-calibrated but not
    // isotonically calibrated
    const std::string csv = write_temp("quad.csv", "x,y\n0,1\n1,4\n2,3\n3,2\n");
    Json forecast;
    forecast["n"] = 4;
    forecast["thresholds"] = Json::array({1.0, 2.0, 3.0, 4.0});
    forecast["cdf"] = Json::array({Json::array({0.5, 0.5, 1.0, 1.0}),
                                   Json::array({0.5, 0.5, 0.5, 1.0}),
                                   Json::array({0.0, 0.5, 1.0, 1.0}),
                                   Json::array({0.0, 0.5, 0.5, 1.0})});
    const std::string path = write_temp("quad_fit.json", forecast.dump());
    CalibrateOptions copt;
    copt.input = csv;
    copt.forecast_path = path;
    Json report;
    REQUIRE(cmd_calibrate(copt, report) == kExitOk);
    const Json& c = report.at("calibration");
    CHECK(c.at("auto").at("ok") == false);
    CHECK(c.at("isotonic").at("ok") == false);
    CHECK(c.at("threshold").at("ok") == true);
    CHECK(c.at("quantile").at("ok") == true);
}

TEST_CASE("order sources") {
    SUBCASE("single column") {
        const std::string csv = write_temp("col.csv", "a,b,y\n1,9,1\n2,1,0\n3,5,2\n");
        FitOptions opt;
        opt.input = csv;
        opt.order = OrderSpec::parse("column:0");
        Json report;
        REQUIRE(cmd_fit(opt, report) == kExitOk);
        const auto rows = report.at("fit").at("cdf").get<std::vector<std::vector<double>>>();
        CHECK(rows[0] == std::vector<double>{0.5, 1.0, 1.0});
    }
    SUBCASE("edge list file") {
        const std::string csv = write_temp("edges.csv", "x,y\n0,1\n0,0\n0,2\n");
        const std::string edges = write_temp("edges.txt", "0 1\n1 2\n");
        FitOptions opt;
        opt.input = csv;
        opt.order = OrderSpec::parse("file:" + edges);
        Json report;
        REQUIRE(cmd_fit(opt, report) == kExitOk);
        const auto rows = report.at("fit").at("cdf").get<std::vector<std::vector<double>>>();
        CHECK(rows[0] == std::vector<double>{0.5, 1.0, 1.0});
    }
    CHECK_THROWS_AS(OrderSpec::parse("banana"), std::invalid_argument);
}

TEST_CASE("weight column") {
    const std::string csv = write_temp("weighted.csv", "x,w,y\n1,2,1\n2,1,0\n3,1,2\n");
    FitOptions opt;
    opt.input = csv;
    opt.order = OrderSpec::parse("column:0");
    opt.weight_column = "w";
    Json report;
    REQUIRE(cmd_fit(opt, report) == kExitOk);
    // pooled block mean carries the doubled weight: survival of 1{y>0} is
    // (2*1+1*0)/3 = 2/3 on the pooled pair
    const auto rows = report.at("fit").at("cdf").get<std::vector<std::vector<double>>>();
    CHECK(rows[0][0] == doctest::Approx(1.0 / 3));
}

TEST_CASE("reports are deterministic modulo timing") {
    const std::string csv = write_temp("det.csv", chain_csv);
    FitOptions opt;
    opt.input = csv;
    opt.order = OrderSpec::parse("componentwise");
    Json a, b;
    REQUIRE(cmd_fit(opt, a) == kExitOk);
    REQUIRE(cmd_fit(opt, b) == kExitOk);
    a.erase("timing");
    b.erase("timing");
    CHECK(a.dump() == b.dump());
}

TEST_CASE("verify suites pass on small budgets") {
    VerifyOptions opt;
    opt.suite = "counterexamples";
    opt.seed = 42;
    Json report;
    CHECK(cmd_verify(opt, report) == kExitOk);
    CHECK(report.at("result").at("pass") == true);
    opt.suite = "oracle";
    opt.max_atoms = 5;
    Json oracle_report;
    CHECK(cmd_verify(opt, oracle_report) == kExitOk);
    CHECK(oracle_report.at("result").at("checked").get<int>() == 200);
    CHECK_FALSE(oracle_report.at("result").at("instance_seeds").empty());
    opt.suite = "nonsense";
    CHECK_THROWS_AS(cmd_verify(opt, report), std::invalid_argument);
}

TEST_CASE("csv error handling") {
    CHECK_THROWS_AS(load_csv("/tmp/icl_does_not_exist.csv"), std::runtime_error);
    const std::string no_y = write_temp("noy.csv", "a,b\n1,2\n");
    CHECK_THROWS_AS(load_csv(no_y), std::invalid_argument);
    const std::string bad = write_temp("bad.csv", "x,y\n1,zzz\n");
    CHECK_THROWS_AS(load_csv(bad), std::runtime_error);
    const std::string ragged = write_temp("ragged.csv", "x,y\n1,2,3\n");
    CHECK_THROWS_AS(load_csv(ragged), std::runtime_error);
    const std::string negw = write_temp("negw.csv", "x,w,y\n1,-1,0\n");
    CHECK_THROWS_AS(load_csv(negw, "w"), std::invalid_argument);
}

TEST_CASE("binary subprocess smoke test") {
    const std::string csv = write_temp("smoke.csv", chain_csv);
    const std::string cmd = std::string(ICL_CLI_PATH) + " fit " + csv + " --out /tmp/icl_smoke_fit.json > /dev/null";
    REQUIRE(std::system(cmd.c_str()) == 0);
    const std::string score_cmd =
        std::string(ICL_CLI_PATH) + " score " + csv + " /tmp/icl_smoke_fit.json > /dev/null";
    CHECK(std::system(score_cmd.c_str()) == 0);
    // parse failures exit with 2, validation failures with 3
    const std::string bad = write_temp("smoke_bad.csv", "x,y\n1,zzz\n");
    const int parse_status = std::system((std::string(ICL_CLI_PATH) + " fit " + bad + " 2>/dev/null >/dev/null").c_str());
    CHECK(WEXITSTATUS(parse_status) == kExitParseError);
    const std::string noy = write_temp("smoke_noy.csv", "a\n1\n");
    const int val_status = std::system((std::string(ICL_CLI_PATH) + " fit " + noy + " 2>/dev/null >/dev/null").c_str());
    CHECK(WEXITSTATUS(val_status) == kExitValidationError);
    // ICL_SEED provides the default seed for verify
    const std::string env_cmd = std::string("ICL_SEED=7 ") + ICL_CLI_PATH +
                                " verify --suite counterexamples --out /tmp/icl_smoke_verify.json > /dev/null";
    REQUIRE(std::system(env_cmd.c_str()) == 0);
    std::ifstream in("/tmp/icl_smoke_verify.json");
    const Json verify_report = Json::parse(in);
    CHECK(verify_report.at("config").at("seed").get<std::uint64_t>() == 7);
}
