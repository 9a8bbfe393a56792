#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "kuznets/records.hpp"
#include "kuznets/table.hpp"

namespace kuznets {

/// Dense regions x sectors slice of one year. `present` marks cells that came
/// from an input record, so the panel can be written back record-for-record.
struct YearSlice {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> wage;
    std::vector<double> employment;
    std::vector<std::uint8_t> present;

    double wage_at(std::size_t r, std::size_t s) const { return wage[r * cols + s]; }
    double employment_at(std::size_t r, std::size_t s) const { return employment[r * cols + s]; }
    double total_wage() const;

    friend bool operator==(const YearSlice&, const YearSlice&) = default;
};

/// Region x sector x year wage and employment totals over a fixed id universe.
/// Regions and sectors are kept in lexicographic order.
class WeightedBipartitePanel {
public:
    WeightedBipartitePanel() = default;
    WeightedBipartitePanel(std::vector<std::string> regions, std::vector<std::string> sectors);

    /// Records must be unique on (region, sector, year); cells without a record are zero.
    static WeightedBipartitePanel from_records(std::span<const RegionSectorRecord> records);

    const std::vector<std::string>& regions() const { return regions_; }
    const std::vector<std::string>& sectors() const { return sectors_; }
    std::vector<int> years() const;
    bool has_year(int year) const { return slices_.count(year) != 0; }

    /// Throws YearAbsent.
    const YearSlice& slice(int year) const;

    void set(int year, std::size_t region, std::size_t sector, double wage, double employment);

    /// Copy restricted to the given years; the id universe is kept.
    WeightedBipartitePanel restrict_years(int first, int last) const;

    /// The panel with wages multiplied by `factor`.
    WeightedBipartitePanel scale_wages(double factor) const;

    std::vector<RegionSectorRecord> records() const;

    friend bool operator==(const WeightedBipartitePanel&, const WeightedBipartitePanel&) = default;

private:
    std::vector<std::string> regions_;
    std::vector<std::string> sectors_;
    std::map<int, YearSlice> slices_;
};

struct LabeledMatrix {
    std::vector<std::string> regions;
    std::vector<std::string> sectors;
    int year = 0;
    std::vector<double> values;

    std::size_t rows() const { return regions.size(); }
    std::size_t cols() const { return sectors.size(); }
    double operator()(std::size_t r, std::size_t s) const { return values[r * cols() + s]; }
    double& operator()(std::size_t r, std::size_t s) { return values[r * cols() + s]; }
};

/// Balassa ratio (X_rs / sum_r' X_r's) / (sum_s' X_rs' / sum X) for a dense
/// rows x cols matrix; zero sector or region totals give 0.
std::vector<double> share_ratio(std::span<const double> values, std::size_t rows, std::size_t cols);

/// Revealed comparative advantage of wages. Throws YearAbsent, AllZeroSlice.
LabeledMatrix rca(const WeightedBipartitePanel& panel, int year);

/// Location quotient of employment. Throws YearAbsent, AllZeroSlice.
LabeledMatrix location_quotient(const WeightedBipartitePanel& panel, int year);

struct IdentityEntry {
    std::size_t region = 0;
    std::size_t sector = 0;
    double rca = 0.0;
    double reconstructed = 0.0;  // LQ times the relative average-wage factor
    bool pass = false;
};

struct IdentityReport {
    int year = 0;
    double tolerance = 0.0;
    std::vector<IdentityEntry> entries;
    std::size_t excluded = 0;
    bool all_pass() const;
};

/// Checks RCA_rs = LQ_rs * (w_rs / w_s) / (w_r / w) where w_s, w_r and w are
/// the employment-weighted average wages of the sector, the region and the
/// whole slice. Entries with E_rs = 0 or any zero denominator are excluded.
IdentityReport check_rca_lq_identity(const WeightedBipartitePanel& panel, int year, double tol = 1e-9);

/// Sparse 0/1 region x sector matrix with no empty row or column.
class BinaryMatrix {
public:
    /// `row_sectors[r]` lists the sector indices present in region r. Throws
    /// DegenerateMatrix on an empty matrix or an all-zero row or column.
    BinaryMatrix(std::vector<std::string> regions, std::vector<std::string> sectors,
                 std::vector<std::vector<std::uint32_t>> row_sectors, int year = 0);

    static BinaryMatrix from_dense(std::vector<std::string> regions, std::vector<std::string> sectors,
                                   const std::vector<std::vector<int>>& entries, int year = 0);

    std::size_t rows() const { return regions_.size(); }
    std::size_t cols() const { return sectors_.size(); }
    const std::vector<std::string>& regions() const { return regions_; }
    const std::vector<std::string>& sectors() const { return sectors_; }
    int year() const { return year_; }

    std::span<const std::uint32_t> row(std::size_t r) const { return row_sectors_[r]; }
    std::span<const std::uint32_t> column(std::size_t s) const { return col_regions_[s]; }
    std::size_t row_degree(std::size_t r) const { return row_sectors_[r].size(); }
    std::size_t column_degree(std::size_t s) const { return col_regions_[s].size(); }
    bool contains(std::size_t r, std::size_t s) const;
    std::size_t ones() const;

    std::vector<std::vector<int>> dense() const;

    /// Ids removed by binarize because their row or column was empty.
    std::vector<std::string> pruned_regions;
    std::vector<std::string> pruned_sectors;

    friend bool operator==(const BinaryMatrix& a, const BinaryMatrix& b) {
        return a.regions_ == b.regions_ && a.sectors_ == b.sectors_ && a.row_sectors_ == b.row_sectors_ &&
               a.year_ == b.year_;
    }

private:
    std::vector<std::string> regions_;
    std::vector<std::string> sectors_;
    std::vector<std::vector<std::uint32_t>> row_sectors_;
    std::vector<std::vector<std::uint32_t>> col_regions_;
    int year_ = 0;
};

/// M_rs = 1 iff RCA_rs >= threshold, then empty rows and columns pruned.
/// Throws DegenerateMatrix if nothing survives, InvalidArgument if threshold <= 0.
BinaryMatrix binarize(const LabeledMatrix& rca_matrix, double threshold = 1.0);

/// Reorders rows and columns. Both orders must be permutations of m's ids
/// (throws OrderMismatch otherwise).
BinaryMatrix sort_by_rank(const BinaryMatrix& m, std::span<const std::string> region_order,
                          std::span<const std::string> sector_order);

/// `region,sector` of present pairs.
TableWriter edge_list_table(const BinaryMatrix& m);
/// 0/1 grid with a header row of sector ids and a leading region column.
TableWriter dense_grid_table(const BinaryMatrix& m);

}  // namespace kuznets
