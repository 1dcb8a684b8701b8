#pragma once

// Shared helpers for the unit and acceptance suites: rank correlation, an
// independent brute-force burst oracle, small statistics, and scratch-dir
// plumbing. Oracles here are deliberately written with different algorithms
// than the library so agreement is meaningful.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hfbi/event_log.hpp"

namespace test_util {

// Average ranks (ties share the mean of their rank block), 1-based.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double mean_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

// Spearman rank correlation with tie-averaged ranks (Pearson on ranks).
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

// Brute-force burst oracle: tests every index window [i, j] for validity
// (length >= 2, all in-window gaps strictly below delta) and maximality
// (the windows cannot be extended on either side). Quadratic on purpose —
// shares no scanning logic with the library implementation.
inline std::vector<std::pair<std::size_t, std::size_t>> oracle_burst_spans(
    const std::vector<std::int64_t>& values, std::int64_t delta) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    const std::size_t n = values.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            bool inside_ok = true;
            for (std::size_t k = i; k < j && inside_ok; ++k)
                inside_ok = values[k + 1] - values[k] < delta;
            if (!inside_ok) continue;
            const bool left_max = i == 0 || values[i] - values[i - 1] >= delta;
            const bool right_max = j == n - 1 || values[j + 1] - values[j] >= delta;
            if (left_max && right_max) out.emplace_back(i, j);
        }
    }
    return out;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Scratch directory under the system temp root, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("hfbi_test_" + tag + "_" + std::to_string(++counter));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Log where every listed user attends the given activities; activity count
// is max id + 1 and `incentives` flags activities by id.
inline hfbi::ActivityLog make_log(
    const std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>>& user_acts,
    const std::vector<std::int64_t>& incentives = {}) {
    std::vector<hfbi::ParticipationRecord> recs;
    for (const auto& [user, acts] : user_acts)
        for (auto a : acts) {
            const bool inc =
                std::find(incentives.begin(), incentives.end(), a) != incentives.end();
            recs.push_back({user, a, std::nullopt, inc});
        }
    return hfbi::ActivityLog::from_records(std::move(recs));
}

}  // namespace test_util
