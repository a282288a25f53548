#pragma once

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "dea/dataset.hpp"

namespace fixtures {

// One input, one output. E = {A, B, C}; D is inefficient.
inline dea::Dataset t1() {
    std::istringstream in("id,in:x,out:y\nA,2,2\nB,4,5\nC,6,6\nD,5,3\n");
    return dea::parse_csv(in, std::nullopt, dea::Rts::Variable);
}

// Two inputs, one output, CRS. E = {A, B}; C is efficient but not extreme.
inline dea::Dataset t2() {
    std::istringstream in("id,in:x1,in:x2,out:y\nA,1,3,1\nB,3,1,1\nC,2,2,1\nD,3,3,1\n");
    return dea::parse_csv(in, std::nullopt, dea::Rts::Constant);
}

/// n in [3, 8], m + s in [2, 4], values in [1, 10] with one decimal.
inline dea::Dataset random_instance(unsigned seed, dea::Rts rts) {
    std::mt19937 rng(seed);
    const int n = std::uniform_int_distribution<int>(3, 8)(rng);
    const int m = std::uniform_int_distribution<int>(1, 3)(rng);
    const int s = std::uniform_int_distribution<int>(1, 4 - m)(rng);
    std::uniform_real_distribution<double> value(1.0, 10.0);
    dea::Dataset d;
    d.rts = rts;
    for (int i = 0; i < m; ++i) {
        d.input_names.push_back("x" + std::to_string(i + 1));
    }
    for (int r = 0; r < s; ++r) {
        d.output_names.push_back("y" + std::to_string(r + 1));
    }
    for (int j = 0; j < n; ++j) {
        dea::DmuRecord rec;
        rec.id = "D" + std::to_string(j + 1);
        for (int i = 0; i < m; ++i) {
            rec.inputs.push_back(std::round(value(rng) * 10.0) / 10.0);
        }
        for (int r = 0; r < s; ++r) {
            rec.outputs.push_back(std::round(value(rng) * 10.0) / 10.0);
        }
        d.dmus.push_back(rec);
    }
    return d;
}

/// n DMUs with m inputs and s outputs, loosely correlated like real
/// production data (outputs grow with inputs).
inline dea::Dataset large_instance(unsigned seed, dea::Rts rts, int n = 38, int m = 3, int s = 3) {
    std::mt19937 rng(seed);
    std::lognormal_distribution<double> size(0.0, 0.6);
    std::uniform_real_distribution<double> noise(0.6, 1.4);
    dea::Dataset d;
    d.rts = rts;
    for (int i = 0; i < m; ++i) {
        d.input_names.push_back("x" + std::to_string(i + 1));
    }
    for (int r = 0; r < s; ++r) {
        d.output_names.push_back("y" + std::to_string(r + 1));
    }
    for (int j = 0; j < n; ++j) {
        const double scale = size(rng);
        dea::DmuRecord rec;
        rec.id = "U" + std::to_string(j + 1);
        for (int i = 0; i < m; ++i) {
            rec.inputs.push_back(100.0 * scale * noise(rng) * std::pow(10.0, i));
        }
        for (int r = 0; r < s; ++r) {
            rec.outputs.push_back(50.0 * scale * noise(rng) * std::pow(10.0, 2 * r));
        }
        d.dmus.push_back(rec);
    }
    return d;
}

}  // namespace fixtures
