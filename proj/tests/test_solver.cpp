/*
 * Copyright 2026 The odro authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "odro/solver.hpp"
#include "test_util.hpp"

using namespace odro;
using namespace odro::solver;

namespace {

// exact simplex projection by enumerating candidate supports (dim <= 4)
Vector simplex_projection_oracle(const Vector& v) {
    const int n = static_cast<int>(v.size());
    Vector best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int mask = 1; mask < (1 << n); ++mask) {
        double sum = 0.0;
        int count = 0;
        for (int i = 0; i < n; ++i)
            if (mask & (1 << i)) {
                sum += v[i];
                ++count;
            }
        const double tau = (sum - 1.0) / count;
        Vector z = Vector::Zero(n);
        bool feasible = true;
        for (int i = 0; i < n; ++i) {
            if (mask & (1 << i)) {
                z[i] = v[i] - tau;
                if (z[i] < -1e-12) feasible = false;
            } else if (v[i] - tau > 1e-12) {
                feasible = false; // KKT: excluded coordinates must not want in
            }
        }
        if (!feasible) continue;
        const double dist = (z - v).squaredNorm();
        if (dist < best_dist) {
            best_dist = dist;
            best = z;
        }
    }
    return best;
}

} // namespace

TEST_CASE("momentum schedule") {
    SUBCASE("seed step") {
        CHECK(initial_delta() == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0));
        const auto m = momentum_next(1.0, initial_delta());
        CHECK(m.eta == 0.0);
        CHECK(m.delta_next == doctest::Approx(2.193527085331054).epsilon(1e-12));
    }
    SUBCASE("second step") {
        const auto first = momentum_next(1.0, initial_delta());
        const auto second = momentum_next(initial_delta(), first.delta_next);
        CHECK(second.eta == doctest::Approx(0.28175352512532087).epsilon(1e-12));
    }
    SUBCASE("recurrence identity over 1000 iterations") {
        double delta_prev = 1.0;
        double delta = initial_delta();
        for (int t = 0; t < 1000; ++t) {
            CHECK(std::abs(delta * delta - delta - delta_prev * delta_prev) < 1e-9);
            const auto m = momentum_next(delta_prev, delta);
            CHECK(m.eta >= 0.0);
            CHECK(m.eta < 1.0);
            CHECK(m.delta_next > delta);
            delta_prev = delta;
            delta = m.delta_next;
        }
    }
}

TEST_CASE("projection") {
    SUBCASE("box clamp") {
        const Box box(Vector::Constant(2, -0.6), Vector::Constant(2, 0.6));
        Vector v(2);
        v << 1.0, -0.2;
        const Vector projected = project(FeasibleSet{box}, v);
        CHECK(projected[0] == 0.6);
        CHECK(projected[1] == -0.2);
    }
    SUBCASE("invalid box bounds throw at construction") {
        Vector lo(1), hi(1);
        lo << 1.0;
        hi << 0.0;
        CHECK_THROWS_AS(Box(lo, hi), InvalidInput);
    }
    SUBCASE("interior simplex point scales to uniform") {
        const FeasibleSet set{UnitSimplex{3}};
        const Vector projected = project(set, Vector::Constant(3, 0.2));
        for (int i = 0; i < 3; ++i) CHECK(projected[i] == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("simplex threshold example") {
        const FeasibleSet set{UnitSimplex{3}};
        Vector v(3);
        v << 0.9, 0.5, -0.2;
        const Vector projected = project(set, v);
        CHECK(projected[0] == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(projected[1] == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(projected[2] == 0.0);
    }
    SUBCASE("simplex projection matches the enumeration oracle") {
        std::mt19937_64 rng(71);
        for (int dim = 2; dim <= 4; ++dim) {
            const FeasibleSet set{UnitSimplex{dim}};
            for (int trial = 0; trial < 200; ++trial) {
                const Vector v = test::random_vector(rng, dim, 1.5);
                const Vector fast = project(set, v);
                const Vector exact = simplex_projection_oracle(v);
                CHECK((fast - exact).cwiseAbs().maxCoeff() < 1e-6);
            }
        }
    }
    SUBCASE("idempotence and nonexpansiveness") {
        std::mt19937_64 rng(73);
        const Box box(Vector::Constant(3, -0.5), Vector::Constant(3, 1.0));
        const std::vector<FeasibleSet> sets{FeasibleSet{box}, FeasibleSet{UnitSimplex{3}}};
        for (const auto& set : sets) {
            for (int trial = 0; trial < 1000; ++trial) {
                const Vector a = test::random_vector(rng, 3, 2.0);
                const Vector b = test::random_vector(rng, 3, 2.0);
                const Vector pa = project(set, a);
                const Vector pb = project(set, b);
                CHECK((pa - pb).norm() <= (a - b).norm() + 1e-12);
                CHECK((project(set, pa) - pa).cwiseAbs().maxCoeff() < 1e-12);
                CHECK(contains(set, pa, 1e-12));
            }
        }
    }
    SUBCASE("already-feasible points are unchanged") {
        std::mt19937_64 rng(79);
        const FeasibleSet set{UnitSimplex{4}};
        for (int trial = 0; trial < 100; ++trial) {
            Vector v = test::random_vector(rng, 4).cwiseAbs();
            v /= v.sum();
            CHECK((project(set, v) - v).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("single step") {
    const Box box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
    const FeasibleSet set{box};

    SUBCASE("zero gradient is a fixed point") {
        Vector u0(2);
        u0 << 0.3, -0.4;
        const auto state = SolverState::initial(u0);
        const auto next = step(state, Vector::Zero(2), 0.5, set);
        CHECK((next.u - u0).cwiseAbs().maxCoeff() == 0.0);
        CHECK((next.y - u0).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("first step is plain projected gradient") {
        Vector u0(2);
        u0 << 0.5, 0.5;
        Vector grad(2);
        grad << 2.0, 0.0;
        const auto state = SolverState::initial(u0);
        const auto next = step(state, grad, 1.0, set);
        // eta_0 = 0, so the lookahead equals the projected point
        CHECK(next.u[0] == doctest::Approx(-1.0)); // clipped
        CHECK((next.y - next.u).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("nonpositive step size throws") {
        const auto state = SolverState::initial(Vector::Zero(2));
        CHECK_THROWS_AS(step(state, Vector::Ones(2), 0.0, set), InvalidInput);
    }
    SUBCASE("non-finite gradient throws") {
        const auto state = SolverState::initial(Vector::Zero(2));
        Vector bad(2);
        bad << 1.0, std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(step(state, bad, 0.1, set), InvalidInput);
    }
    SUBCASE("momentum scalar below one throws") {
        CHECK_THROWS_AS(momentum_next(1.0, 0.5), InvalidInput);
    }
    SUBCASE("momentum identity holds along a trajectory") {
        auto state = SolverState::initial(Vector::Zero(2));
        std::mt19937_64 rng(83);
        for (int t = 0; t < 200; ++t) {
            state = step(state, test::random_vector(rng, 2), 0.1, set);
            CHECK(std::abs(state.delta * state.delta - state.delta -
                           state.delta_prev * state.delta_prev) < 1e-10);
            CHECK(contains(set, state.u, 0.0));
        }
    }
}

TEST_CASE("static accelerated rate") {
    const Box box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
    const FeasibleSet set{box};

    SUBCASE("isotropic quadratic with unit step converges immediately") {
        Vector c(2);
        c << 0.2, -0.1;
        Vector u0(2);
        u0 << 1.0, 0.7;
        auto state = SolverState::initial(u0);
        const double f0 = 0.5 * (u0 - c).squaredNorm();
        const double golden = initial_delta();
        for (int t = 1; t <= 100; ++t) {
            state = step(state, state.y - c, 1.0, set);
            const double subopt = 0.5 * (state.u - c).squaredNorm();
            if (t >= 2) CHECK(subopt <= 4.0 * f0 * golden * golden /
                                         ((t + 2.0) * (t + 2.0)) + 1e-15);
        }
        CHECK((state.u - c).cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("anisotropic quadratic obeys the inverse-square envelope") {
        Vector d(2), c(2), u0(2);
        d << 1.0, 0.2;
        c << 0.3, -0.2;
        u0 << 1.0, 1.0;
        auto state = SolverState::initial(u0);
        const auto subopt = [&](const Vector& u) {
            return 0.5 * (d.array() * (u - c).array().square()).sum();
        };
        double c_envelope = 0.0;
        for (int t = 1; t <= 3000; ++t) {
            const Vector grad = (d.array() * (state.y - c).array()).matrix();
            state = step(state, grad, 1.0, set);
            if (t == 2) c_envelope = subopt(state.u) * 16.0;
            if (t > 2)
                CHECK(subopt(state.u) <= c_envelope / ((t + 2.0) * (t + 2.0)) + 1e-15);
        }
    }
}

TEST_CASE("online loop") {
    const Box box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
    const FeasibleSet set{box};
    Vector c(2);
    c << 0.25, -0.5;

    const auto static_problem = [&](std::int64_t, const Vector&) -> OnlineProblem {
        OnlineProblem problem;
        problem.value_grad = [c](const Vector& u) {
            return ValueGrad{0.5 * (u - c).squaredNorm(), u - c};
        };
        problem.lip = 1.0;
        problem.smooth_b = 1.0;
        return problem;
    };

    SUBCASE("horizon zero returns no records") {
        const auto records = run_online(static_problem, set, 0, StepRule::kInverseLipschitz,
                                        1.0, Vector::Zero(2));
        CHECK(records.empty());
    }

    SUBCASE("constant objective reduces to the static iteration") {
        const auto records = run_online(static_problem, set, 50, StepRule::kInverseLipschitz,
                                        1.0, Vector::Zero(2));
        REQUIRE(records.size() == 50);
        auto state = SolverState::initial(Vector::Zero(2));
        for (const auto& record : records) {
            state = step(state, state.y - c, 1.0, set);
            CHECK((record.u - state.u).cwiseAbs().maxCoeff() == 0.0);
            CHECK(record.step_size == 1.0);
            CHECK(contains(set, record.u, 0.0));
        }
    }

    SUBCASE("monotone rule never increases the step") {
        std::mt19937_64 rng(91);
        std::uniform_real_distribution<double> b_draw(0.5, 4.0);
        std::vector<double> bs;
        const auto varying = [&](std::int64_t t, const Vector&) -> OnlineProblem {
            OnlineProblem problem;
            problem.value_grad = [c](const Vector& u) {
                return ValueGrad{0.5 * (u - c).squaredNorm(), u - c};
            };
            problem.lip = 1.0;
            problem.smooth_b = b_draw(rng);
            bs.push_back(problem.smooth_b);
            (void)t;
            return problem;
        };
        const double mu = 0.7;
        const auto records =
            run_online(varying, set, 100, StepRule::kMonotone, mu, Vector::Zero(2));
        double expected = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < records.size(); ++i) {
            expected = std::min(expected, mu / bs[i]);
            CHECK(records[i].step_size == doctest::Approx(expected).epsilon(1e-15));
            if (i > 0) CHECK(records[i].step_size <= records[i - 1].step_size);
        }
    }

    SUBCASE("identical runs are bit-identical") {
        const auto r1 = run_online(static_problem, set, 40, StepRule::kInverseLipschitz, 1.0,
                                   Vector::Zero(2));
        const auto r2 = run_online(static_problem, set, 40, StepRule::kInverseLipschitz, 1.0,
                                   Vector::Zero(2));
        for (std::size_t i = 0; i < r1.size(); ++i) {
            CHECK((r1[i].u - r2[i].u).cwiseAbs().maxCoeff() == 0.0);
            CHECK(r1[i].objective == r2[i].objective);
        }
    }

    SUBCASE("assembly errors carry the step index") {
        const auto failing = [&](std::int64_t t, const Vector& u) -> OnlineProblem {
            if (t == 3) throw InvalidInput("synthetic failure");
            return static_problem(t, u);
        };
        CHECK_THROWS_WITH_AS(run_online(failing, set, 10, StepRule::kInverseLipschitz, 1.0,
                                        Vector::Zero(2)),
                             doctest::Contains("step 3"), InvalidInput);
    }

    SUBCASE("simplex feasibility along a run") {
        const FeasibleSet simplex{UnitSimplex{3}};
        std::mt19937_64 rng(97);
        const auto drifting = [&](std::int64_t, const Vector&) -> OnlineProblem {
            const Vector target = test::random_vector(rng, 3);
            OnlineProblem problem;
            problem.value_grad = [target](const Vector& u) {
                return ValueGrad{0.5 * (u - target).squaredNorm(), u - target};
            };
            problem.lip = 1.0;
            problem.smooth_b = 1.0;
            return problem;
        };
        const auto records = run_online(drifting, simplex, 300, StepRule::kInverseLipschitz,
                                        1.0, Vector::Constant(3, 1.0 / 3.0));
        for (const auto& record : records) {
            CHECK(record.u.minCoeff() >= 0.0);
            CHECK(std::abs(record.u.sum() - 1.0) <= 1e-12);
        }
    }

    SUBCASE("multiple inner updates drive the iterate further") {
        const auto single = run_online(static_problem, set, 5, StepRule::kInverseLipschitz,
                                       1.0, Vector::Zero(2), 1);
        const auto triple = run_online(static_problem, set, 5, StepRule::kInverseLipschitz,
                                       1.0, Vector::Zero(2), 3);
        CHECK((triple.back().u - c).norm() <= (single.back().u - c).norm() + 1e-12);
    }
}
