#include <cmath>

#include "doctest.h"
#include "parobs/data.hpp"
#include "parobs/parareal.hpp"
#include "test_helpers.hpp"

using namespace parobs;
using testutil::bench;
using testutil::bench_design;
using testutil::diagonal_design;

namespace {

struct Setup {
    SystemSpec spec;
    ObserverDesign design;
    GridSpec grid;
    ForcingGrid forcing;
    Window window;

    static Setup benchmark(int fine_steps = 32, double t0 = 0.0) {
        Setup s{bench(), bench_design(), GridSpec(1.0, 16, fine_steps), {}, {}};
        const auto plant =
            PlantData::backward_euler(s.spec.sys, s.grid.dt_fine, t0 + 2.0);
        s.forcing = ForcingGrid::from_plant(s.design, s.spec.sys, plant);
        s.window = Window{t0, s.grid};
        return s;
    }
};

const StopRule never = [](const JumpHistory&) { return false; };
const StopRule always = [](const JumpHistory&) { return true; };

}  // namespace

TEST_CASE("coarse initialization") {
    SUBCASE("zero data keeps the zero state") {
        Vector d(2);
        d << -2.0, -4.0;
        const auto design = diagonal_design(d);
        const GridSpec grid(1.0, 8, 4);
        const auto g = ForcingGrid::zero(2, grid.dt_fine, 1.0);
        const Matrix u = coarse_init(design, g, Window{0.0, grid}, Vector::Zero(2));
        CHECK(u.norm() == 0.0);
    }
    SUBCASE("single subinterval is one coarse step") {
        auto s = Setup::benchmark();
        const GridSpec grid(1.0 / 16.0, 1, 32);
        Window w{0.0, grid};
        const Vector z0 = s.design.zhat0();
        const Matrix u = coarse_init(s.design, s.forcing, w, z0);
        const Vector step = be_coarse(s.design, s.forcing, grid, 0.0, grid.dT, z0);
        CHECK((u.col(1) - step).norm() == 0.0);
    }
    SUBCASE("benchmark sweep equals the loop-free composition") {
        auto s = Setup::benchmark();
        const Vector z0 = s.design.zhat0();
        const Matrix u = coarse_init(s.design, s.forcing, s.window, z0);
        Vector z = z0;
        for (int n = 1; n <= 16; ++n) {
            z = be_coarse(s.design, s.forcing, s.grid, s.window.node(n - 1),
                          s.window.node(n), z);
            CHECK((u.col(n) - z).norm() == 0.0);
        }
    }
}

TEST_CASE("finite termination reproduces the sequential fine solve") {
    auto s = Setup::benchmark();
    const Vector z0 = s.design.zhat0();
    const WindowResult res = solve_window(s.design, s.forcing, s.window, z0, never);
    CHECK(res.k_obs == 16);
    const Matrix fine = sequential_fine(s.design, s.forcing, s.window, z0);
    const double rel = (res.iterates - fine).norm() / fine.norm();
    CHECK(rel <= 1e-12);
    // jumps at the final iteration are identically zero
    for (double j : res.jumps.z_norms.back()) CHECK(j <= 1e-13);
}

TEST_CASE("identical propagators collapse to the coarse sweep") {
    auto s = Setup::benchmark(1);  // dt_fine == dT
    const Vector z0 = s.design.zhat0();
    PararealState st = make_parareal_state(s.design, s.forcing, s.window, z0);
    parareal_iteration(st, s.design, s.forcing, s.window);
    CHECK((st.U[1] - st.U[0]).norm() == 0.0);
    const WindowResult res = solve_window(s.design, s.forcing, s.window, z0, always);
    CHECK(res.k_obs == 1);
    for (double j : res.jumps.z_norms.back()) CHECK(j == 0.0);
}

TEST_CASE("jump norms decay beyond the first correction") {
    auto s = Setup::benchmark();
    const WindowResult res =
        solve_window(s.design, s.forcing, s.window, s.design.zhat0(), never);
    auto max_jump = [&](int k) {
        double v = 0.0;
        for (double j : res.jumps.z_norms[k]) v = std::max(v, j);
        return v;
    };
    for (int k = 1; k + 1 < static_cast<int>(res.jumps.z_norms.size()); ++k)
        CHECK(max_jump(k + 1) <= max_jump(k) * (1.0 + 1e-12));
}

TEST_CASE("solve_window stop handling") {
    auto s = Setup::benchmark();
    SUBCASE("an always-true rule costs one correction pass") {
        const WindowResult res =
            solve_window(s.design, s.forcing, s.window, s.design.zhat0(), always);
        CHECK(res.k_obs == 1);
    }
    SUBCASE("zero dynamics and data terminate immediately") {
        Vector d(2);
        d << -2.0, -4.0;
        const auto design = diagonal_design(d);
        const GridSpec grid(1.0, 8, 4);
        const auto g = ForcingGrid::zero(2, grid.dt_fine, 1.0);
        const WindowResult res =
            solve_window(design, g, Window{0.0, grid}, Vector::Zero(2), always);
        CHECK(res.k_obs == 1);
        for (const auto& per_k : res.jumps.z_norms)
            for (double j : per_k) CHECK(j == 0.0);
    }
}

TEST_CASE("worker count does not change a single bit") {
    auto s = Setup::benchmark();
    const Vector z0 = s.design.zhat0();
    const WindowResult a = solve_window(s.design, s.forcing, s.window, z0, never, 1);
    const WindowResult b = solve_window(s.design, s.forcing, s.window, z0, never, 8);
    REQUIRE(a.k_obs == b.k_obs);
    CHECK((a.iterates - b.iterates).norm() == 0.0);
    CHECK((a.end_state - b.end_state).norm() == 0.0);
    for (std::size_t k = 0; k < a.jumps.z_norms.size(); ++k)
        for (std::size_t n = 0; n < a.jumps.z_norms[k].size(); ++n)
            CHECK(a.jumps.z_norms[k][n] == b.jumps.z_norms[k][n]);
}

TEST_CASE("measured jumps respect the a priori jump bound") {
    auto s = Setup::benchmark();
    const auto plant = PlantData::backward_euler(s.spec.sys, s.grid.dt_fine, 12.0);
    const auto c = compute_constants(s.design, s.spec.sys, s.grid, 12.0, plant);
    const BoundTable table(c, 16, 16);
    const double allowance = 10.0 * fine_error_allowance(c, s.grid);

    const WindowResult res =
        solve_window(s.design, s.forcing, s.window, s.design.zhat0(), never);
    for (int k = 0; k < static_cast<int>(res.jumps.z_norms.size()); ++k)
        for (int n = 1; n <= 16; ++n)
            CHECK(res.jumps.z_norms[k][n - 1] <= table.jump_bound(k, n) + allowance);
}
