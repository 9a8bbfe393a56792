#include "kuznets/nestedness.hpp"

#include <bit>
#include <vector>

#include "kuznets/random.hpp"

namespace kuznets {

namespace {

using Bits = std::vector<std::uint64_t>;

std::vector<Bits> pack(std::size_t count, std::size_t width, auto&& members) {
    std::vector<Bits> out(count, Bits((width + 63) / 64, 0));
    for (std::size_t i = 0; i < count; ++i) {
        for (auto j : members(i)) out[i][j / 64] |= std::uint64_t{1} << (j % 64);
    }
    return out;
}

std::size_t overlap(const Bits& a, const Bits& b) {
    std::size_t n = 0;
    for (std::size_t k = 0; k < a.size(); ++k) n += static_cast<std::size_t>(std::popcount(a[k] & b[k]));
    return n;
}

double paired_sum(const std::vector<Bits>& sets, const std::vector<std::size_t>& degree) {
    double acc = 0.0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (std::size_t j = i + 1; j < sets.size(); ++j) {
            if (degree[i] > degree[j]) acc += static_cast<double>(overlap(sets[i], sets[j])) / degree[j];
        }
    }
    return acc;
}

}  // namespace

double nodf(const BinaryMatrix& m) {
    const auto rows = pack(m.rows(), m.cols(), [&](std::size_t r) { return m.row(r); });
    const auto cols = pack(m.cols(), m.rows(), [&](std::size_t s) { return m.column(s); });
    std::vector<std::size_t> row_deg(m.rows()), col_deg(m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) row_deg[r] = m.row_degree(r);
    for (std::size_t s = 0; s < m.cols(); ++s) col_deg[s] = m.column_degree(s);
    const double pairs = static_cast<double>(m.rows() * (m.rows() - 1) / 2 + m.cols() * (m.cols() - 1) / 2);
    if (pairs == 0.0) return 0.0;
    return 100.0 * (paired_sum(rows, row_deg) + paired_sum(cols, col_deg)) / pairs;
}

BinaryMatrix degree_preserving_shuffle(const BinaryMatrix& m, std::uint64_t seed, double swaps_per_entry) {
    const std::size_t cols = m.cols();
    std::vector<std::uint8_t> dense(m.rows() * cols, 0);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (auto s : m.row(r)) {
            dense[r * cols + s] = 1;
            edges.emplace_back(static_cast<std::uint32_t>(r), s);
        }
    }
    auto eng = stream_engine(seed, 0);
    const auto attempts = static_cast<std::size_t>(swaps_per_entry * static_cast<double>(edges.size()));
    for (std::size_t t = 0; t < attempts; ++t) {
        auto& e1 = edges[uniform_index(eng, edges.size())];
        auto& e2 = edges[uniform_index(eng, edges.size())];
        const auto [r1, c1] = e1;
        const auto [r2, c2] = e2;
        if (r1 == r2 || c1 == c2) continue;
        if (dense[r1 * cols + c2] || dense[r2 * cols + c1]) continue;
        dense[r1 * cols + c1] = 0;
        dense[r2 * cols + c2] = 0;
        dense[r1 * cols + c2] = 1;
        dense[r2 * cols + c1] = 1;
        e1 = {r1, c2};
        e2 = {r2, c1};
    }
    std::vector<std::vector<std::uint32_t>> row_sets(m.rows());
    for (const auto& [r, s] : edges) row_sets[r].push_back(s);
    return BinaryMatrix(m.regions(), m.sectors(), std::move(row_sets), m.year());
}

}  // namespace kuznets
