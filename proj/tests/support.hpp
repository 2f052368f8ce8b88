#pragma once

#include <unistd.h>

#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "xnbf/image.hpp"

namespace testing {

inline xnbf::Image from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const int h = static_cast<int>(rows.size());
    const int w = static_cast<int>(rows.begin()->size());
    std::vector<double> px;
    for (const auto& r : rows) px.insert(px.end(), r.begin(), r.end());
    return xnbf::Image(w, h, std::move(px));
}

// 5x5, values 1..25 row-major
inline xnbf::Image matrix_a() {
    std::vector<double> px(25);
    for (int i = 0; i < 25; ++i) px[i] = i + 1;
    return xnbf::Image(5, 5, std::move(px));
}

inline xnbf::Image random_image(int w, int h, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    xnbf::Image img(w, h);
    for (double& v : img.pixels()) v = u(rng);
    return img;
}

// Small integers: exact under any reordering of sums
inline xnbf::Image random_int_image(int w, int h, std::uint64_t seed, int lo, int hi) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> u(lo, hi);
    xnbf::Image img(w, h);
    for (double& v : img.pixels()) v = u(rng);
    return img;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("xnbf_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

} // namespace testing
