#pragma once

#include <span>
#include <string>
#include <vector>

#include "kuznets/bipartite.hpp"
#include "kuznets/table.hpp"

namespace kuznets {

/// Region fitness F_r and sector complexity Q_s, each normalized to mean 1.
struct FitnessState {
    std::vector<double> f;
    std::vector<double> q;
    int iteration = 0;
};

struct SolverConfig {
    double value_tol = 1e-13;   // max relative change for value convergence
    int rank_patience = 20;     // consecutive iterations with unchanged rankings
    int max_iterations = 5000;
};

/// Descending order with ties broken by lexicographic id. `order[k]` is the
/// index ranked k+1; `rank[i]` is the 1-based rank of index i.
struct Ranking {
    std::vector<std::size_t> order;
    std::vector<std::size_t> rank;

    friend bool operator==(const Ranking&, const Ranking&) = default;
};

Ranking rank(std::span<const double> values, std::span<const std::string> ids);

struct ConvergenceLogEntry {
    int iteration = 0;
    double residual = 0.0;
    int ranks_stable = 0;
};

struct FitnessResult {
    FitnessState final_state;
    Ranking region_ranking;
    Ranking sector_ranking;
    bool converged_values = false;
    bool converged_ranks = false;
    int iterations_used = 0;
    double value_residual = 0.0;
    std::vector<ConvergenceLogEntry> log;
};

/// Uniform mean-1 start. Throws DegenerateMatrix for an empty matrix.
FitnessState initialize(const BinaryMatrix& m);

/// One application of the coupled map
///   F~_r = sum_s M_rs Q_s,   Q~_s = 1 / sum_r M_rs / F_r,
/// both from the previous state, followed by division by the mean.
/// Switches to log-sum-exp accumulation for Q~ once some 1/F_r exceeds 1e300.
/// Throws NumericUnderflow naming the sector (or region) whose value is no
/// longer representable.
FitnessState step(const BinaryMatrix& m, const FitnessState& s);

/// Iterates from the uniform start until values settle (value_tol) or the
/// rankings have been unchanged for rank_patience iterations. Throws
/// NoConvergence if neither happens within max_iterations.
FitnessResult solve(const BinaryMatrix& m, const SolverConfig& config = {});

/// As above from a caller-supplied positive start (rescaled to mean 1).
FitnessResult solve(const BinaryMatrix& m, const SolverConfig& config, FitnessState start);

/// Ids ordered most fit first / most complex first.
std::vector<std::string> ranked_regions(const BinaryMatrix& m, const FitnessResult& result);
std::vector<std::string> ranked_sectors(const BinaryMatrix& m, const FitnessResult& result);

/// (id, fitness_value, fitness_rank) for regions.
TableWriter fitness_table(const BinaryMatrix& m, const FitnessResult& result);
/// (id, complexity_value, complexity_rank) for sectors.
TableWriter complexity_table(const BinaryMatrix& m, const FitnessResult& result);
/// (iteration, residual, ranks_stable).
TableWriter convergence_table(const FitnessResult& result);

}  // namespace kuznets
