#include "affine/errors.hpp"
#include "affine/io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace affine;
using affine::testing::Draw;

TEST_CASE("numbers keep 17 significant digits") {
    CHECK(io::format_number(0.1) == "0.10000000000000001");
    CHECK(io::format_number(1.0) == "1");
    Draw draw(1);
    for (int k = 0; k < 100; ++k) {
        const double v = draw.normal() * std::pow(10.0, draw.uniform(-30, 30));
        CHECK(std::stod(io::format_number(v)) == v);
    }
}

TEST_CASE("JSON dumps keep full precision and null out non-finite values") {
    const io::Json doc{{"x", 1.0 / 3.0}, {"bad", std::nan("")}, {"list", {1.5, 2.5}}};
    const std::string text = io::dump(doc);
    CHECK(text.find("0.33333333333333331") != std::string::npos);
    const io::Json back = io::Json::parse(text);
    CHECK(back.at("x").get<double>() == 1.0 / 3.0);
    CHECK(back.at("bad").is_null());
    CHECK(back.at("list").size() == 2);
}

TEST_CASE("model and potential blocks round-trip") {
    ModelSpec model;
    model.kind = ModelKind::MetrMetr;
    model.a = 1.25;
    model.d = 0.1;
    model.hbar = 0.7;
    const ModelSpec back = io::model_from_json(io::Json::parse(io::dump(io::to_json(model))));
    CHECK(back.kind == ModelKind::MetrMetr);
    CHECK(back.a == 1.25);
    CHECK(back.d == 0.1);
    CHECK(back.hbar == 0.7);

    PotentialSpec potential;
    potential.kind = DilatationalKind::SteepOscillator;
    potential.k = 2.0;
    potential.exponent = 6.0;
    potential.pairwise = PairwiseKind::Harmonic;
    potential.pair_k = 0.3;
    const PotentialSpec pback = io::potential_from_json(io::Json::parse(io::dump(io::to_json(potential))));
    CHECK(pback.kind == DilatationalKind::SteepOscillator);
    CHECK(pback.exponent == 6.0);
    CHECK(pback.pairwise == PairwiseKind::Harmonic);
    CHECK(pback.pair_k == 0.3);

    const PotentialSpec nested =
        io::potential_from_json(io::Json{{"kind", "Box"}, {"params", {{"width", 2.5}}}});
    CHECK(nested.width == 2.5);
}

TEST_CASE("unknown or malformed keys are configuration errors") {
    CHECK_THROWS_AS(io::model_from_json(io::Json{{"kind", "AffAff"}, {"mass", 1.0}}), ConfigError);
    CHECK_THROWS_AS(io::model_from_json(io::Json{{"kind", "Rigid"}}), ConfigError);
    CHECK_THROWS_AS(io::model_from_json(io::Json{{"A", 1.0}}), ConfigError);
    CHECK_THROWS_AS(io::model_from_json(io::Json{{"kind", "AffAff"}, {"A", "one"}}), ConfigError);
    CHECK_THROWS_AS(io::potential_from_json(io::Json{{"kind", "Box"}}), ConfigError);
    CHECK_THROWS_AS(io::potential_from_json(io::Json{{"kind", "Well"}}), ConfigError);
    CHECK_THROWS_AS(io::potential_from_json(io::Json{{"kind", "Box"}, {"width", 1.0}, {"params", {{"width", 2.0}}}}),
                    ConfigError);
    CHECK_THROWS_AS(io::potential_from_json(io::Json{{"kind", "Box"}, {"params", {{"depth", 2.0}}}}), ConfigError);
    CHECK_THROWS_AS(io::state_from_json(io::Json{{"q", {0.1, 0.0}}, {"P", {0.0, 0.0}}}), ConfigError);
    CHECK_THROWS_AS(io::state_from_json(io::Json{{"q", {0.1, 0.0}}, {"M", {{0.0, 1.0}, {1.0, 0.0}}}}), ConfigError);
    CHECK_THROWS_AS(io::state_from_json(io::Json{{"q", {0.1, 0.0, 0.0}}, {"M", {1.0}}}), ConfigError);
}

TEST_CASE("reduced state accepts dense or upper-triangle couplings") {
    Draw draw(2);
    const ReducedState s = draw.state(3);
    const ReducedState dense = io::state_from_json(io::Json::parse(io::dump(io::to_json(s))));
    CHECK(dense.flatten() == s.flatten());
    const io::Json upper{{"q", {0.5, 0.0, -0.5}}, {"M", {1.0, 2.0, 3.0}}};
    const ReducedState u = io::state_from_json(upper);
    CHECK(u.M(0, 2) == 2.0);
    CHECK(u.M(2, 1) == -3.0);
    CHECK(u.p.isZero());
}

TEST_CASE("trajectory CSV layout") {
    CHECK(io::trajectory_header(3) == "t,q1,q2,q3,p1,p2,p3,M12,M13,M23,N12,N13,N23,E,C2");
    ReducedState s(2);
    s.q = Vector{{0.25, -0.25}};
    ModelSpec model;
    const Trajectory t = integrate(model, PotentialSpec{}, s, 0.2, {.step = 0.1});
    std::ostringstream out;
    io::write_trajectory_csv(out, t);
    std::istringstream lines(out.str());
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK(header == io::trajectory_header(2));
    CHECK(row == "0,0.25,-0.25,0,0,0,0,0,0");
}

TEST_CASE("spectrum JSON re-parses with the problem echo") {
    SpectralProblem p;
    p.potential.kind = DilatationalKind::Box;
    p.potential.width = 1.0;
    p.axes = {Axis{-0.5, 0.5, 32}};
    const Spectrum s = eigensolve(build_reduced_hamiltonian(p), 3);
    const io::Json back = io::Json::parse(io::dump(io::spectrum_to_json(p, s)));
    CHECK(back.at("eigenvalues").size() == 3);
    CHECK(back.at("eigenvalues")[0].get<double>() == s.eigenvalues[0]);
    CHECK(back.at("problem").at("mode") == "dilatational");
    CHECK(back.at("grid").at("active_nodes") == 32);
    CHECK(back.at("boundary") == "dirichlet");
    CHECK(io::model_from_json(back.at("problem").at("model")).A == p.model.A);

    std::ostringstream csv;
    io::write_eigenvector_csv(csv, s.eigenvectors[0]);
    std::istringstream lines(csv.str());
    std::string line;
    int count = 0;
    std::getline(lines, line);
    CHECK(line == "node,m,k,real,imag");
    while (std::getline(lines, line)) ++count;
    CHECK(count == 32);
}

TEST_CASE("reports serialize") {
    const io::Json b = io::to_json(check_brackets(1, 2));
    CHECK(b.at("trials") == 2);
    CHECK(b.at("passed").get<bool>());
    const io::Json c = io::to_json(classify_planar(1.0, 2.0, -0.03));
    CHECK(c.at("verdict") == "Bounded");
    CHECK(c.at("turning_points").size() == 2);
}
