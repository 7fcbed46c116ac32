// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <regex>
#include <set>

#include "fqmc/bench.hpp"
#include "fqmc/errors.hpp"

using namespace fqmc;

namespace {

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return Errc::InvalidSpec;
}

}  // namespace

TEST_SUITE("bench") {
    TEST_CASE("slope fit recovers an exact power law") {
        std::vector<double> N, err;
        for (int k = 6; k <= 13; ++k) {
            N.push_back(std::ldexp(1.0, k));
            err.push_back(3.0 * std::pow(N.back(), -1.25));
        }
        const LinearFit f = fit_slope(N, err);
        CHECK(f.slope == doctest::Approx(-1.25).epsilon(1e-9));
        CHECK(f.intercept == doctest::Approx(std::log2(3.0)).epsilon(1e-9));
        CHECK(pow2_grid(6, 8) == std::vector<std::size_t>{64, 128, 256});
    }

    TEST_CASE("catalog ids are unique and resolvable") {
        std::set<std::string> ids;
        for (const Instance& i : instance_catalog()) {
            CHECK(ids.insert(i.id).second);
            CHECK(find_instance(i.id).id == i.id);
        }
        const Instance f9 = find_instance("fig9_con_vg_d3");
        CHECK(f9.model.dim() == 3);
        CHECK(f9.model.kind == ModelKind::VG);
        CHECK(f9.payoff.kind == PayoffKind::CONCall);
        CHECK(find_instance("fig9_com_gh_d2").model.alpha == 12.0);
        CHECK(code_of([] { (void)find_instance("fig99"); }) == Errc::InvalidSpec);
        CHECK(code_of([] { (void)find_instance("fig9_con_vg_dx"); }) == Errc::InvalidSpec);
    }

    TEST_CASE("closed-form references") {
        const auto put = closed_form_reference(find_instance("fig1_put_gbm_1d"));
        REQUIRE(put.has_value());
        CHECK(put->value == doctest::Approx(7.965567455405804).epsilon(1e-12));
        CHECK_FALSE(closed_form_reference(find_instance("fig7_con_vg_6d")).has_value());
    }

    TEST_CASE("convergence run on a well-transformed call") {
        const Instance inst = find_instance("fig4_call_gbm_1d_sigma5");
        const Reference ref = compute_reference(inst);
        const ConvergenceRun run = run_convergence(inst, Backend::RQMC, pow2_grid(6, 11), 16, 1, ref);
        CHECK(run.points.size() == 6);
        CHECK(run.slope < -0.9);
        for (const auto& p : run.points) CHECK(p.rel_error == doctest::Approx(p.stat_error / std::abs(ref.value)));
        CHECK(code_of([&] { (void)run_convergence(inst, Backend::RQMC, {64, 128}, 8, 1, ref); }) == Errc::InvalidSpec);
        CHECK(code_of([&] { (void)run_convergence(inst, Backend::RQMC, {64, 100, 128, 256, 512}, 8, 1, ref); }) ==
              Errc::InvalidSpec);
    }

    TEST_CASE("CSV round trip and schema errors") {
        const Instance inst = find_instance("fig4_call_gbm_1d_sigma5");
        const Reference ref = compute_reference(inst);
        const auto rows = to_rows(run_convergence(inst, Backend::RQMC, pow2_grid(4, 8), 4, 2, ref));
        CHECK(rows.size() == 6);
        CHECK(rows.back().slope.has_value());
        CHECK_FALSE(rows.back().estimate.has_value());
        const std::string text = format_csv(rows);
        CHECK(parse_csv(text) == rows);
        CHECK(format_csv(parse_csv(text)) == text);

        CHECK(code_of([] { (void)parse_csv("a,b,c\n1,2,3\n"); }) == Errc::SchemaError);
        // Non-numeric dimension cell in the first data row.
        std::string bad = text;
        std::size_t pos = bad.find('\n') + 1;
        for (int comma = 0; comma < 4; ++comma) pos = bad.find(',', pos) + 1;
        bad.insert(pos, "x");
        CHECK(code_of([&] { (void)parse_csv(bad); }) == Errc::SchemaError);
        std::string short_row = text.substr(0, text.find('\n') + 1) + "only,three,cells\n";
        CHECK(code_of([&] { (void)parse_csv(short_row); }) == Errc::SchemaError);

        const auto dir = std::filesystem::temp_directory_path() / "fqmc_csv_test";
        std::filesystem::create_directories(dir);
        const std::string path = (dir / csv_file_name(inst.id, "rqmc")).string();
        write_csv(path, rows);
        CHECK(read_csv(path) == rows);
        std::filesystem::remove_all(dir);
        CHECK(code_of([] { (void)read_csv("/nonexistent/x.csv"); }) == Errc::SchemaError);
    }

    TEST_CASE("file names carry instance, backend and UTC time") {
        const std::regex re(R"(fig1_put_gbm_1d__rqmc__\d{8}T\d{9}Z\.csv)");
        CHECK(std::regex_match(csv_file_name("fig1_put_gbm_1d", "rqmc"), re));
    }

    TEST_CASE("runtime to tolerance") {
        const Instance inst = find_instance("fig1_put_gbm_1d");
        const Reference ref = *closed_form_reference(inst);
        RuntimeOptions o;
        o.repetitions = 1;
        const auto t0 = std::chrono::steady_clock::now();
        const RuntimeToTolerance loose = run_runtime_to_tol(inst, {Backend::RQMC}, {0.5}, 1, ref, o);
        CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 1.0);
        REQUIRE(loose.points.size() == 1);
        CHECK(loose.points[0].reached);
        CHECK(loose.points[0].N == o.rqmc_N0);

        const RuntimeToTolerance run =
            run_runtime_to_tol(inst, {Backend::RQMC, Backend::PhysicalMC}, {1e-2, 1e-3, 1e-1}, 1, ref, o);
        CHECK(run.stopping_rule == "double_until_rel_error_le_tol");
        CHECK_FALSE(run.budget_exceeded());
        for (Backend b : {Backend::RQMC, Backend::PhysicalMC}) {
            std::vector<RuntimePoint> pts;
            for (const auto& p : run.points)
                if (p.backend == b) pts.push_back(p);
            REQUIRE(pts.size() == 3);
            for (std::size_t i = 0; i < pts.size(); ++i) {
                CHECK(pts[i].reached);
                CHECK(pts[i].achieved <= pts[i].tol);
                if (i > 0) {
                    CHECK(pts[i].tol < pts[i - 1].tol);
                    CHECK(pts[i].N >= pts[i - 1].N);
                    CHECK(pts[i].wall_ms >= pts[i - 1].wall_ms);
                }
            }
        }
        for (const CsvRow& r : to_rows(run)) CHECK(r.rel_error.has_value());
    }

    TEST_CASE("TP node count to tolerance") {
        const Instance inst = find_instance("fig1_put_gbm_1d");
        const Reference ref = *closed_form_reference(inst);
        const TpNodeCount a = tp_nodes_to_tol(inst, 1e-3, ref);
        const TpNodeCount b = tp_nodes_to_tol(inst, 1e-6, ref);
        CHECK(a.reached);
        CHECK(b.reached);
        CHECK(a.nodes <= b.nodes);
        CHECK(b.rel_error <= 1e-6);
        CHECK(a.evaluations == 2 * a.nodes);
    }

    TEST_CASE("suites") {
        const auto ids = suite_ids();
        CHECK(ids.size() == 10);
        SuiteOptions o;
        o.out_dir = (std::filesystem::temp_directory_path() / "fqmc_suite_test").string();
        CHECK(code_of([&] { (void)run_suite("fig42", o); }) == Errc::InvalidSpec);
    }
}
