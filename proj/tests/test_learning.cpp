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

#include "odro/learning.hpp"
#include "odro/scenarios.hpp"
#include "test_util.hpp"

using namespace odro;
using namespace odro::learning;

namespace {

// constant-output predictors, handy for hand-checkable Gram systems
PredictorBasis constant_basis(const std::vector<Vector>& outputs, int m) {
    PredictorBasis basis;
    for (const auto& value : outputs) {
        basis.f1.push_back([value](std::int64_t, const Vector&) { return value; });
        const auto n = value.size();
        basis.f2.push_back([n, m](std::int64_t, const Vector&) { return Matrix::Zero(n, m); });
    }
    return basis;
}

ObservationWindow noiseless_oscillator_window(int steps, const sim::OscillatorParams& params) {
    ObservationWindow window;
    window.t = steps;
    Vector x = params.x0;
    const Vector zero_u = Vector::Zero(2);
    const Vector zero_w = Vector::Zero(2);
    window.states.push_back(x);
    for (int k = 0; k < steps; ++k) {
        x = sim::oscillator_step(x, zero_u, zero_w, params);
        window.states.push_back(x);
        window.controls.push_back(zero_u);
    }
    return window;
}

} // namespace

TEST_CASE("gram system hand examples") {
    SUBCASE("scalar window with binding regularizer") {
        // T=1, p=1, n=1: f = 2, d = 1 so P = 0.5, next state 6
        ObservationWindow window;
        window.t = 1;
        Vector x0(1), x1(1);
        x0 << 0.0;
        x1 << 6.0;
        window.states = {x0, x1};
        window.controls = {Vector::Zero(1)};
        Vector f(1);
        f << 2.0;
        const auto basis = constant_basis({f}, 1);
        const auto gram = build_gram(window, basis, 1.0);
        CHECK(gram.A(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(gram.b(0) == doctest::Approx(6.0).epsilon(1e-15));
        CHECK(gram.regularizers[0] == doctest::Approx(0.5));

        const auto est = estimate_alpha(gram.A, gram.b);
        CHECK(est.alpha(0) == doctest::Approx(3.0).epsilon(1e-15));
        CHECK_FALSE(est.degenerate);
    }

    SUBCASE("zero predictors give the zero system") {
        ObservationWindow window;
        window.t = 2;
        window.states = {Vector::Zero(2), Vector::Ones(2), Vector::Zero(2)};
        window.controls = {Vector::Zero(1), Vector::Zero(1)};
        const auto basis = constant_basis({Vector::Zero(2)}, 1);
        const auto gram = build_gram(window, basis, 1.0);
        CHECK(gram.A.cwiseAbs().maxCoeff() == 0.0);
        CHECK(gram.b.cwiseAbs().maxCoeff() == 0.0);

        const auto est = estimate_alpha(gram.A, gram.b);
        CHECK(est.degenerate);
        CHECK(est.alpha.cwiseAbs().maxCoeff() == 0.0);
        CHECK(est.sigma_min == 0.0);
    }

    SUBCASE("orthonormal predictor outputs give the identity") {
        ObservationWindow window;
        window.t = 3;
        window.states = {Vector::Zero(2), Vector::Zero(2), Vector::Zero(2), Vector::Zero(2)};
        window.controls = {Vector::Zero(1), Vector::Zero(1), Vector::Zero(1)};
        Vector e1(2), e2(2);
        e1 << 1.0, 0.0;
        e2 << 0.0, 1.0;
        const auto basis = constant_basis({e1, e2}, 1);
        const auto gram = build_gram(window, basis, 100.0); // P = I
        CHECK((gram.A - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
    }

    SUBCASE("non-finite predictor output names the indices") {
        ObservationWindow window;
        window.t = 1;
        window.states = {Vector::Zero(1), Vector::Zero(1)};
        window.controls = {Vector::Zero(1)};
        PredictorBasis basis;
        basis.f1.push_back([](std::int64_t, const Vector&) {
            Vector v(1);
            v << std::numeric_limits<double>::quiet_NaN();
            return v;
        });
        basis.f2.push_back([](std::int64_t, const Vector&) { return Matrix::Zero(1, 1); });
        CHECK_THROWS_WITH_AS(build_gram(window, basis, 1.0),
                             doctest::Contains("(i=1, k=0)"), InvalidInput);
    }
}

TEST_CASE("alpha estimation") {
    SUBCASE("identity gram") {
        Vector b(2);
        b << 0.3, 0.7;
        const auto est = estimate_alpha(Matrix::Identity(2, 2), b);
        CHECK((est.alpha - b).cwiseAbs().maxCoeff() < 1e-15);
        CHECK(est.sigma_min == doctest::Approx(1.0));
    }

    SUBCASE("noiseless oscillator recovers the true combination") {
        const sim::OscillatorParams params;
        const auto window = noiseless_oscillator_window(500, params);
        const auto basis = sim::oscillator_basis(params);
        const auto gram = build_gram(window, basis, 1.0);
        const auto est = estimate_alpha(gram.A, gram.b);
        CHECK(est.alpha(0) == doctest::Approx(1.0 - params.b0).epsilon(1e-8));
        CHECK(est.alpha(1) == doctest::Approx(params.b0).epsilon(1e-8));
    }

    SUBCASE("exact recovery for a synthetic full-rank model") {
        // data generated noiselessly from a combination of two predictors
        std::mt19937_64 rng(5);
        PredictorBasis basis;
        basis.f1.push_back([](std::int64_t, const Vector& x) -> Vector { return x; });
        basis.f1.push_back([](std::int64_t, const Vector& x) -> Vector {
            Vector v(2);
            v << std::sin(x[0]), std::cos(x[1]);
            return v;
        });
        for (int i = 0; i < 2; ++i)
            basis.f2.push_back(
                [](std::int64_t, const Vector&) -> Matrix { return Matrix::Identity(2, 2); });
        Vector alpha_true(2);
        alpha_true << 0.4, 0.6;

        ObservationWindow window;
        window.t = 40;
        Vector x = test::random_vector(rng, 2);
        window.states.push_back(x);
        for (int k = 0; k < 40; ++k) {
            const Vector u = test::random_vector(rng, 2, 0.3);
            Vector next = Vector::Zero(2);
            for (int i = 0; i < 2; ++i)
                next += alpha_true[i] * basis.evaluate(i, k, x, u);
            window.states.push_back(next);
            window.controls.push_back(u);
            x = next;
        }
        const auto gram = build_gram(window, basis, 1.0);
        const auto est = estimate_alpha(gram.A, gram.b);
        CHECK((est.alpha - alpha_true).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("input validation") {
    SUBCASE("window shape errors") {
        ObservationWindow window;
        window.t = 1;
        CHECK_THROWS_AS(window.validate(), InvalidInput); // no transitions
        window.states = {Vector::Zero(2), Vector::Zero(2), Vector::Zero(2)};
        window.controls = {Vector::Zero(1)};
        CHECK_THROWS_AS(window.validate(), InvalidInput); // count mismatch
        window.states = {Vector::Zero(2), Vector::Zero(3)};
        CHECK_THROWS_AS(window.validate(), InvalidInput); // ragged states
    }
    SUBCASE("basis shape errors") {
        PredictorBasis basis;
        CHECK_THROWS_AS(basis.validate(), InvalidInput);
        basis.f1.push_back([](std::int64_t, const Vector& x) { return x; });
        CHECK_THROWS_AS(basis.validate(), InvalidInput); // missing f2
    }
    SUBCASE("learning config bounds") {
        LearningConfig cfg;
        cfg.beta = 1.0;
        CHECK_THROWS_AS(cfg.validate(), InvalidInput);
        cfg = LearningConfig{};
        cfg.theta = -0.1;
        CHECK_THROWS_AS(cfg.validate(), InvalidInput);
        cfg = LearningConfig{};
        cfg.t0 = 0;
        CHECK_THROWS_AS(cfg.validate(), InvalidInput);
    }
    SUBCASE("non-finite gram inputs") {
        Matrix a = Matrix::Identity(2, 2);
        a(0, 0) = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(estimate_alpha(a, Vector::Zero(2)), InvalidInput);
    }
    SUBCASE("empty concentration window") {
        CHECK_THROWS_AS(concentration_epsilon(2, 1.0, 0, 0.05, 1.0), InvalidInput);
    }
}

TEST_CASE("regularizer satisfies the norm bound") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        ObservationWindow window;
        window.t = 5;
        for (int k = 0; k <= 5; ++k) window.states.push_back(test::random_vector(rng, 3, 4.0));
        for (int k = 0; k < 5; ++k) window.controls.push_back(test::random_vector(rng, 2));
        PredictorBasis basis;
        for (int i = 0; i < 2; ++i) {
            const Matrix gain = test::random_matrix(rng, 3, 2);
            basis.f1.push_back([](std::int64_t, const Vector& x) -> Vector { return 2.0 * x; });
            basis.f2.push_back([gain](std::int64_t, const Vector&) { return gain; });
        }
        const double d = 0.8;
        const auto features = compute_features(window, basis, d);
        for (int k = 0; k < features.length(); ++k)
            for (int i = 0; i < features.predictors(); ++i)
                CHECK(features.regularizer[static_cast<std::size_t>(k)] *
                          features.f[static_cast<std::size_t>(k)].col(i).norm() <=
                      d + 1e-12);
    }
}

TEST_CASE("prediction points") {
    SUBCASE("time-invariant repeat of the same state returns observed next states") {
        // u = u_k and x_t = x_k for every k: the predictor terms cancel and
        // each point reduces to the observed next state
        Vector state(2), control(1);
        state << 0.5, -0.2;
        control << 0.3;
        PredictorBasis basis;
        for (int i = 0; i < 2; ++i) {
            const double w = i == 0 ? 1.0 : -1.0;
            basis.f1.push_back(
                [w](std::int64_t, const Vector& x) -> Vector { return w * x; });
            basis.f2.push_back(
                [](std::int64_t, const Vector&) { return Matrix::Zero(2, 1); });
        }
        ObservationWindow window;
        window.t = 3;
        window.states = {state, state, state, state};
        window.controls = {control, control, control};
        Vector alpha(2);
        alpha << 1.25, -0.25; // sums to one
        const auto points = prediction_points(window, basis, alpha, control);
        for (const auto& point : points)
            CHECK((point - state).cwiseAbs().maxCoeff() < 1e-14);
    }

    SUBCASE("single zero predictor returns next states") {
        ObservationWindow window;
        window.t = 2;
        Vector a(1), b(1), c(1);
        a << 1.0;
        b << 2.0;
        c << 3.0;
        window.states = {a, b, c};
        window.controls = {Vector::Zero(1), Vector::Zero(1)};
        const auto basis = constant_basis({Vector::Zero(1)}, 1);
        Vector alpha(1);
        alpha << 1.0;
        const auto points = prediction_points(window, basis, alpha, Vector::Zero(1));
        CHECK(points[0](0) == doctest::Approx(2.0));
        CHECK(points[1](0) == doctest::Approx(3.0));
    }

    SUBCASE("noiseless oscillator predicts the exact next state") {
        const sim::OscillatorParams params;
        const auto window = noiseless_oscillator_window(100, params);
        const auto basis = sim::oscillator_basis(params);
        Vector alpha(2);
        alpha << 1.0 - params.b0, params.b0;
        Vector u(2);
        u << 0.2, -0.1;
        const auto points = prediction_points(window, basis, alpha, u);
        const Vector expected = sim::oscillator_step(window.states.back(), u, Vector::Zero(2),
                                                     params);
        for (const auto& point : points)
            CHECK((point - expected).cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("degenerate alpha sum is rejected") {
        ObservationWindow window;
        window.t = 1;
        window.states = {Vector::Zero(1), Vector::Ones(1)};
        window.controls = {Vector::Zero(1)};
        const auto basis = constant_basis({Vector::Ones(1), Vector::Ones(1)}, 1);
        Vector alpha(2);
        alpha << 0.5, -0.5;
        CHECK_THROWS_WITH_AS(prediction_points(window, basis, alpha, Vector::Zero(1)),
                             doctest::Contains("degenerate alpha sum"), InvalidInput);
    }
}

TEST_CASE("concentration radius and confidence") {
    SUBCASE("frozen hand evaluation") {
        // n=2, sigma=1, T=500, beta=0.05, a0=1
        const double eps = concentration_epsilon(2, 1.0, 500, 0.05, 1.0);
        CHECK(eps == doctest::Approx(0.15481 + 0.04472).epsilon(1e-3));
        CHECK(eps == doctest::Approx(std::sqrt(0.008 * std::log(20.0)) +
                                     1.0 / std::sqrt(500.0))
                         .epsilon(1e-12));
    }

    SUBCASE("epsilon strictly decreases in T") {
        for (int n : {1, 2, 3, 5}) {
            double prev = concentration_epsilon(n, 0.7, 1, 0.1, 0.5);
            for (int T = 2; T <= 100; ++T) {
                const double cur = concentration_epsilon(n, 0.7, T, 0.1, 0.5);
                CHECK(cur < prev);
                prev = cur;
            }
        }
    }

    SUBCASE("rho vanishes at theta zero and increases to 1 - beta") {
        const double beta = 0.1;
        const double c = 2.0;
        const int T = 50;
        CHECK(confidence_rho(0.0, T, c, 2.0 * c + 0.0, beta, 2) == 0.0);
        double prev = -1.0;
        for (double theta = 0.0; theta <= 50.0; theta += 0.5) {
            const double gamma = 2.0 * c + theta;
            const double rho = confidence_rho(theta, T, c, gamma, beta, 2);
            CHECK(rho >= prev - 1e-15);
            CHECK(rho < 1.0 - beta + 1e-15);
            prev = rho;
        }
        const double huge = confidence_rho(1e9, T, c, 2.0 * c + 1e9, beta, 2);
        CHECK(huge == doctest::Approx(1.0 - beta).epsilon(1e-12));
    }

    SUBCASE("alternate confidence form coincides") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> draw(0.1, 10.0);
        for (int trial = 0; trial < 100; ++trial) {
            const double c = draw(rng);
            const double theta = draw(rng);
            const int n = 1 + static_cast<int>(draw(rng));
            const double gamma = n * c + theta;
            const double a = confidence_rho(theta, 40, c, gamma, 0.05, n);
            const double b = confidence_rho_alt(40, c, gamma, 0.05, n);
            CHECK(a == doctest::Approx(b).epsilon(1e-12));
        }
    }
}

TEST_CASE("ambiguity set assembly") {
    const sim::OscillatorParams params;
    const auto window = noiseless_oscillator_window(60, params);
    const auto basis = sim::oscillator_basis(params);
    LearningConfig cfg;
    cfg.beta = 0.05;
    cfg.theta = 0.5;
    cfg.sigma = 1.0;
    cfg.d = 1.0;
    cfg.t0 = 60;

    const auto model = learn_model(window, basis, cfg);
    Vector u(2);
    u << 0.1, 0.0;
    const auto ambiguity = build_ambiguity(window, basis, model.alpha, model, cfg, u);

    SUBCASE("support masses are uniform and sum to one") {
        CHECK(static_cast<int>(ambiguity.support.size()) == 60);
        CHECK(ambiguity.mass * ambiguity.support.size() == doctest::Approx(1.0));
    }
    SUBCASE("radius decomposes into concentration plus weighted drift") {
        CHECK(ambiguity.radius ==
              doctest::Approx(ambiguity.epsilon + model.gamma * ambiguity.drift));
        CHECK(ambiguity.radius >= 0.0);
        CHECK(ambiguity.rho >= 0.0);
        CHECK(ambiguity.rho < 1.0);
    }
    SUBCASE("rank-deficient gram is rejected") {
        LearnedModel broken = model;
        broken.sigma_min = 0.0;
        CHECK_THROWS_WITH_AS(build_ambiguity(window, basis, model.alpha, broken, cfg, u),
                             doctest::Contains("rank-deficient"), InvalidInput);
    }
}

TEST_CASE("drift term properties") {
    std::mt19937_64 rng(29);

    SUBCASE("stationary window with matching controls has zero drift") {
        // time-invariant predictors evaluated at identical (x, u) pairs
        Vector state(2);
        state << 0.4, 0.9;
        Vector control(2);
        control << 0.1, -0.3;
        PredictorBasis basis;
        basis.f1.push_back([](std::int64_t, const Vector& x) -> Vector { return 0.5 * x; });
        basis.f2.push_back(
            [](std::int64_t, const Vector&) -> Matrix { return Matrix::Identity(2, 2); });
        ObservationWindow window;
        window.t = 3;
        window.states = {state, state, state, state};
        window.controls = {control, control, control};
        const auto features = compute_features(window, basis, 1.0);
        CHECK(drift_term(features, basis, control) == 0.0);
    }

    SUBCASE("drift is invariant to shifting all predictor outputs") {
        const Vector shift = test::random_vector(rng, 2, 3.0);
        ObservationWindow window;
        window.t = 4;
        for (int k = 0; k <= 4; ++k) window.states.push_back(test::random_vector(rng, 2));
        for (int k = 0; k < 4; ++k) window.controls.push_back(test::random_vector(rng, 2));

        PredictorBasis plain, shifted;
        for (int i = 0; i < 2; ++i) {
            const double w = 0.5 + i;
            plain.f1.push_back([w](std::int64_t, const Vector& x) -> Vector { return w * x; });
            shifted.f1.push_back(
                [w, shift](std::int64_t, const Vector& x) -> Vector { return w * x + shift; });
            for (auto* b : {&plain, &shifted})
                b->f2.push_back(
                    [](std::int64_t, const Vector&) { return Matrix::Identity(2, 2); });
        }
        const Vector u = test::random_vector(rng, 2);
        const double h_plain = drift_term(compute_features(window, plain, 1.0), plain, u);
        const double h_shifted =
            drift_term(compute_features(window, shifted, 1.0), shifted, u);
        CHECK(h_plain == doctest::Approx(h_shifted).epsilon(1e-12));
    }
}

TEST_CASE("incremental window features match the one-shot path") {
    const sim::OscillatorParams params;
    const auto basis = sim::oscillator_basis(params);
    std::mt19937_64 rng(41);

    // build incrementally, trimming to a horizon of 8
    WindowFeatures incremental;
    std::vector<Vector> states{params.x0};
    std::vector<Vector> controls;
    Vector x = params.x0;
    for (int k = 0; k < 20; ++k) {
        const Vector u = test::random_vector(rng, 2, 0.2);
        const Vector w = test::random_vector(rng, 2, 1.0);
        const Vector next = sim::oscillator_step(x, u, w, params);
        append_transition(incremental, basis, 1.0, k, x, u, next);
        trim_front(incremental, 8);
        states.push_back(next);
        controls.push_back(u);
        x = next;
    }
    incremental.t = 20;
    incremental.x_now = x;

    ObservationWindow window;
    window.t = 20;
    window.states.assign(states.end() - 9, states.end());
    window.controls.assign(controls.end() - 8, controls.end());
    const auto oneshot = compute_features(window, basis, 1.0);

    REQUIRE(incremental.length() == oneshot.length());
    for (int k = 0; k < oneshot.length(); ++k) {
        CHECK((incremental.f[static_cast<std::size_t>(k)] -
               oneshot.f[static_cast<std::size_t>(k)])
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
        CHECK(incremental.regularizer[static_cast<std::size_t>(k)] ==
              oneshot.regularizer[static_cast<std::size_t>(k)]);
    }
    const auto gram_inc = build_gram(incremental);
    const auto gram_one = build_gram(oneshot);
    CHECK((gram_inc.A - gram_one.A).cwiseAbs().maxCoeff() == 0.0);
    CHECK((gram_inc.b - gram_one.b).cwiseAbs().maxCoeff() == 0.0);
}
