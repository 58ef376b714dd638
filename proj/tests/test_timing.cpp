#include <chrono>

#include "doctest.h"
#include "parobs/data.hpp"
#include "parobs/parareal.hpp"
#include "parobs/timing.hpp"
#include "test_helpers.hpp"

using namespace parobs;

TEST_CASE("no-op closures cost no more than the clock baseline") {
    const double res = timing::resolution();
    const double noop = timing::median_seconds([] {});
    CHECK(noop <= res + 1e-9);
}

TEST_CASE("a busy wait of known length is measured within 20 percent") {
    const double target = 2e-3;
    const double measured = timing::median_seconds([&] {
        const auto start = timing::clock::now();
        while (timing::seconds_since(start) < target) {
        }
    });
    CHECK(measured == doctest::Approx(target).epsilon(0.2));
}

TEST_CASE("a fine window solve costs about N subinterval solves") {
    const auto spec = testutil::bench();
    const auto design = testutil::bench_design();
    const GridSpec grid(1.0, 16, 32);
    const auto plant = PlantData::backward_euler(spec.sys, grid.dt_fine, 2.0);
    const auto g = ForcingGrid::from_plant(design, spec.sys, plant);
    const Window w{0.0, grid};
    const Vector z0 = design.zhat0();

    const double whole = timing::median_seconds(
        [&] { (void)sequential_fine(design, g, w, z0); }, 9);
    const double one = timing::median_seconds(
        [&] { (void)be_fine(design, g, grid, 0.0, grid.dT, z0); }, 9);
    const double ratio = whole / one;
    CHECK(ratio >= 16.0 * 0.7);
    CHECK(ratio <= 16.0 * 1.3);
}
