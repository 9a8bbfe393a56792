#include "kuznets/bipartite.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "kuznets/error.hpp"

namespace kuznets {

double YearSlice::total_wage() const {
    long double total = 0.0L;
    for (double w : wage) total += w;
    return static_cast<double>(total);
}

WeightedBipartitePanel::WeightedBipartitePanel(std::vector<std::string> regions, std::vector<std::string> sectors)
    : regions_(std::move(regions)), sectors_(std::move(sectors)) {}

WeightedBipartitePanel WeightedBipartitePanel::from_records(std::span<const RegionSectorRecord> records) {
    std::vector<std::string> regions, sectors;
    regions.reserve(records.size());
    sectors.reserve(records.size());
    for (const auto& rec : records) {
        regions.push_back(rec.region_id);
        sectors.push_back(rec.sector_id);
    }
    for (auto* ids : {&regions, &sectors}) {
        std::sort(ids->begin(), ids->end());
        ids->erase(std::unique(ids->begin(), ids->end()), ids->end());
    }
    WeightedBipartitePanel panel(regions, sectors);
    std::unordered_map<std::string, std::size_t> region_index, sector_index;
    for (std::size_t i = 0; i < regions.size(); ++i) region_index.emplace(regions[i], i);
    for (std::size_t i = 0; i < sectors.size(); ++i) sector_index.emplace(sectors[i], i);
    for (const auto& rec : records) {
        const auto r = region_index.at(rec.region_id);
        const auto s = sector_index.at(rec.sector_id);
        auto& sl = panel.slices_[rec.year];
        if (sl.rows == 0) {
            sl.rows = regions.size();
            sl.cols = sectors.size();
            sl.wage.assign(sl.rows * sl.cols, 0.0);
            sl.employment.assign(sl.rows * sl.cols, 0.0);
            sl.present.assign(sl.rows * sl.cols, 0);
        }
        if (sl.present[r * sl.cols + s]) {
            throw Error(Errc::DuplicateKey, "(" + rec.region_id + ", " + rec.sector_id + ", " +
                                                std::to_string(rec.year) + ")");
        }
        panel.set(rec.year, r, s, rec.wage_total, rec.employment);
    }
    return panel;
}

std::vector<int> WeightedBipartitePanel::years() const {
    std::vector<int> out;
    out.reserve(slices_.size());
    for (const auto& [year, _] : slices_) out.push_back(year);
    return out;
}

const YearSlice& WeightedBipartitePanel::slice(int year) const {
    const auto it = slices_.find(year);
    if (it == slices_.end()) throw Error(Errc::YearAbsent, "year " + std::to_string(year) + " not in panel");
    return it->second;
}

void WeightedBipartitePanel::set(int year, std::size_t region, std::size_t sector, double wage, double employment) {
    if (region >= regions_.size() || sector >= sectors_.size()) {
        throw Error(Errc::InvalidArgument, "cell index outside the panel universe");
    }
    if (!(wage >= 0.0) || !(employment >= 0.0) || !std::isfinite(wage) || !std::isfinite(employment)) {
        throw Error(Errc::InvariantViolation, "panel entries must be finite and nonnegative");
    }
    auto& sl = slices_[year];
    if (sl.rows == 0) {
        sl.rows = regions_.size();
        sl.cols = sectors_.size();
        sl.wage.assign(sl.rows * sl.cols, 0.0);
        sl.employment.assign(sl.rows * sl.cols, 0.0);
        sl.present.assign(sl.rows * sl.cols, 0);
    }
    const auto k = region * sl.cols + sector;
    sl.wage[k] = wage;
    sl.employment[k] = employment;
    sl.present[k] = 1;
}

WeightedBipartitePanel WeightedBipartitePanel::restrict_years(int first, int last) const {
    WeightedBipartitePanel out(regions_, sectors_);
    for (const auto& [year, sl] : slices_) {
        if (year >= first && year <= last) out.slices_.emplace(year, sl);
    }
    return out;
}

WeightedBipartitePanel WeightedBipartitePanel::scale_wages(double factor) const {
    WeightedBipartitePanel out = *this;
    for (auto& [_, sl] : out.slices_) {
        for (double& w : sl.wage) w *= factor;
    }
    return out;
}

std::vector<RegionSectorRecord> WeightedBipartitePanel::records() const {
    std::vector<RegionSectorRecord> out;
    for (const auto& [year, sl] : slices_) {
        for (std::size_t r = 0; r < sl.rows; ++r) {
            for (std::size_t s = 0; s < sl.cols; ++s) {
                const auto k = r * sl.cols + s;
                if (!sl.present[k]) continue;
                out.push_back({regions_[r], sectors_[s], year, sl.wage[k], sl.employment[k]});
            }
        }
    }
    return out;
}

std::vector<double> share_ratio(std::span<const double> values, std::size_t rows, std::size_t cols) {
    std::vector<long double> row_total(rows, 0.0L), col_total(cols, 0.0L);
    long double total = 0.0L;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t s = 0; s < cols; ++s) {
            const long double v = values[r * cols + s];
            row_total[r] += v;
            col_total[s] += v;
            total += v;
        }
    }
    std::vector<double> out(rows * cols, 0.0);
    if (total <= 0.0L) return out;
    for (std::size_t r = 0; r < rows; ++r) {
        if (row_total[r] <= 0.0L) continue;
        for (std::size_t s = 0; s < cols; ++s) {
            if (col_total[s] <= 0.0L) continue;
            const long double v = values[r * cols + s];
            out[r * cols + s] = static_cast<double>((v * total) / (col_total[s] * row_total[r]));
        }
    }
    return out;
}

namespace {

LabeledMatrix balassa(const WeightedBipartitePanel& panel, int year, bool use_wages) {
    const auto& sl = panel.slice(year);
    const auto& source = use_wages ? sl.wage : sl.employment;
    const bool any_positive = std::any_of(source.begin(), source.end(), [](double v) { return v > 0.0; });
    if (!any_positive) {
        throw Error(Errc::AllZeroSlice, std::string(use_wages ? "wage" : "employment") + " slice for year " +
                                            std::to_string(year) + " is all zero");
    }
    LabeledMatrix out;
    out.regions = panel.regions();
    out.sectors = panel.sectors();
    out.year = year;
    out.values = share_ratio(source, sl.rows, sl.cols);
    return out;
}

}  // namespace

LabeledMatrix rca(const WeightedBipartitePanel& panel, int year) { return balassa(panel, year, true); }

LabeledMatrix location_quotient(const WeightedBipartitePanel& panel, int year) {
    return balassa(panel, year, false);
}

bool IdentityReport::all_pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const IdentityEntry& e) { return e.pass; });
}

IdentityReport check_rca_lq_identity(const WeightedBipartitePanel& panel, int year, double tol) {
    const auto& sl = panel.slice(year);
    const auto rows = sl.rows;
    const auto cols = sl.cols;
    std::vector<long double> w_row(rows, 0.0L), w_col(cols, 0.0L), e_row(rows, 0.0L), e_col(cols, 0.0L);
    long double w_all = 0.0L, e_all = 0.0L;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t s = 0; s < cols; ++s) {
            const long double w = sl.wage_at(r, s);
            const long double e = sl.employment_at(r, s);
            w_row[r] += w;
            w_col[s] += w;
            e_row[r] += e;
            e_col[s] += e;
            w_all += w;
            e_all += e;
        }
    }
    const auto rca_values = share_ratio(sl.wage, rows, cols);
    const auto lq_values = share_ratio(sl.employment, rows, cols);

    IdentityReport report;
    report.year = year;
    report.tolerance = tol;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t s = 0; s < cols; ++s) {
            const long double e = sl.employment_at(r, s);
            if (e <= 0.0L || e_col[s] <= 0.0L || e_row[r] <= 0.0L || w_col[s] <= 0.0L || w_row[r] <= 0.0L ||
                w_all <= 0.0L) {
                ++report.excluded;
                continue;
            }
            const long double avg = sl.wage_at(r, s) / e;
            const long double avg_sector = w_col[s] / e_col[s];
            const long double avg_region = w_row[r] / e_row[r];
            const long double avg_all = w_all / e_all;
            const long double factor = (avg / avg_sector) / (avg_region / avg_all);
            const double lhs = rca_values[r * cols + s];
            const double rhs = static_cast<double>(lq_values[r * cols + s] * factor);
            const double scale = std::max(std::abs(lhs), std::abs(rhs));
            const bool pass = std::abs(lhs - rhs) <= tol * std::max(scale, 1e-300);
            report.entries.push_back({r, s, lhs, rhs, pass});
        }
    }
    return report;
}

BinaryMatrix::BinaryMatrix(std::vector<std::string> regions, std::vector<std::string> sectors,
                           std::vector<std::vector<std::uint32_t>> row_sectors, int year)
    : regions_(std::move(regions)), sectors_(std::move(sectors)), row_sectors_(std::move(row_sectors)), year_(year) {
    if (regions_.empty() || sectors_.empty()) throw Error(Errc::DegenerateMatrix, "empty binary matrix");
    if (row_sectors_.size() != regions_.size()) {
        throw Error(Errc::InvalidArgument, "row adjacency does not match region count");
    }
    col_regions_.assign(sectors_.size(), {});
    for (std::size_t r = 0; r < row_sectors_.size(); ++r) {
        auto& row = row_sectors_[r];
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        if (row.empty()) throw Error(Errc::DegenerateMatrix, "region " + regions_[r] + " has no sector");
        for (auto s : row) {
            if (s >= sectors_.size()) throw Error(Errc::InvalidArgument, "sector index out of range");
            col_regions_[s].push_back(static_cast<std::uint32_t>(r));
        }
    }
    for (std::size_t s = 0; s < col_regions_.size(); ++s) {
        if (col_regions_[s].empty()) throw Error(Errc::DegenerateMatrix, "sector " + sectors_[s] + " has no region");
    }
}

BinaryMatrix BinaryMatrix::from_dense(std::vector<std::string> regions, std::vector<std::string> sectors,
                                      const std::vector<std::vector<int>>& entries, int year) {
    if (entries.size() != regions.size()) throw Error(Errc::InvalidArgument, "row count does not match regions");
    std::vector<std::vector<std::uint32_t>> rows(entries.size());
    for (std::size_t r = 0; r < entries.size(); ++r) {
        if (entries[r].size() != sectors.size()) throw Error(Errc::InvalidArgument, "ragged dense matrix");
        for (std::size_t s = 0; s < entries[r].size(); ++s) {
            if (entries[r][s] != 0 && entries[r][s] != 1) throw Error(Errc::InvalidArgument, "entries must be 0/1");
            if (entries[r][s]) rows[r].push_back(static_cast<std::uint32_t>(s));
        }
    }
    return BinaryMatrix(std::move(regions), std::move(sectors), std::move(rows), year);
}

bool BinaryMatrix::contains(std::size_t r, std::size_t s) const {
    const auto& row = row_sectors_[r];
    return std::binary_search(row.begin(), row.end(), static_cast<std::uint32_t>(s));
}

std::size_t BinaryMatrix::ones() const {
    std::size_t n = 0;
    for (const auto& row : row_sectors_) n += row.size();
    return n;
}

std::vector<std::vector<int>> BinaryMatrix::dense() const {
    std::vector<std::vector<int>> out(rows(), std::vector<int>(cols(), 0));
    for (std::size_t r = 0; r < rows(); ++r) {
        for (auto s : row_sectors_[r]) out[r][s] = 1;
    }
    return out;
}

BinaryMatrix binarize(const LabeledMatrix& rca_matrix, double threshold) {
    if (!(threshold > 0.0) || !std::isfinite(threshold)) {
        throw Error(Errc::InvalidArgument, "threshold must be positive");
    }
    const auto rows = rca_matrix.rows();
    const auto cols = rca_matrix.cols();
    std::vector<std::uint8_t> keep_col(cols, 0);
    std::vector<std::vector<std::uint32_t>> row_sectors(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t s = 0; s < cols; ++s) {
            if (rca_matrix(r, s) >= threshold) {
                row_sectors[r].push_back(static_cast<std::uint32_t>(s));
                keep_col[s] = 1;
            }
        }
    }
    // Dropping empty rows cannot empty a column and vice versa, so one pass
    // over each axis is enough.
    std::vector<std::uint32_t> new_col(cols, 0);
    std::vector<std::string> sectors, pruned_sectors;
    for (std::size_t s = 0; s < cols; ++s) {
        if (keep_col[s]) {
            new_col[s] = static_cast<std::uint32_t>(sectors.size());
            sectors.push_back(rca_matrix.sectors[s]);
        } else {
            pruned_sectors.push_back(rca_matrix.sectors[s]);
        }
    }
    std::vector<std::string> regions, pruned_regions;
    std::vector<std::vector<std::uint32_t>> kept_rows;
    for (std::size_t r = 0; r < rows; ++r) {
        if (row_sectors[r].empty()) {
            pruned_regions.push_back(rca_matrix.regions[r]);
            continue;
        }
        for (auto& s : row_sectors[r]) s = new_col[s];
        regions.push_back(rca_matrix.regions[r]);
        kept_rows.push_back(std::move(row_sectors[r]));
    }
    if (regions.empty()) {
        throw Error(Errc::DegenerateMatrix, "no entry reaches the threshold in year " +
                                                std::to_string(rca_matrix.year));
    }
    BinaryMatrix out(std::move(regions), std::move(sectors), std::move(kept_rows), rca_matrix.year);
    out.pruned_regions = std::move(pruned_regions);
    out.pruned_sectors = std::move(pruned_sectors);
    return out;
}

namespace {

std::vector<std::size_t> permutation_from(std::span<const std::string> order, const std::vector<std::string>& ids,
                                          const char* what) {
    if (order.size() != ids.size()) {
        throw Error(Errc::OrderMismatch, std::string(what) + " order has " + std::to_string(order.size()) +
                                             " ids, matrix has " + std::to_string(ids.size()));
    }
    std::unordered_map<std::string_view, std::size_t> index;
    for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], i);
    std::vector<std::size_t> perm;
    std::vector<std::uint8_t> seen(ids.size(), 0);
    perm.reserve(order.size());
    for (const auto& id : order) {
        const auto it = index.find(id);
        if (it == index.end() || seen[it->second]) {
            throw Error(Errc::OrderMismatch, std::string(what) + " order is not a permutation (at '" + id + "')");
        }
        seen[it->second] = 1;
        perm.push_back(it->second);
    }
    return perm;
}

}  // namespace

BinaryMatrix sort_by_rank(const BinaryMatrix& m, std::span<const std::string> region_order,
                          std::span<const std::string> sector_order) {
    const auto row_perm = permutation_from(region_order, m.regions(), "region");
    const auto col_perm = permutation_from(sector_order, m.sectors(), "sector");
    std::vector<std::uint32_t> new_col(m.cols());
    for (std::size_t k = 0; k < col_perm.size(); ++k) new_col[col_perm[k]] = static_cast<std::uint32_t>(k);
    std::vector<std::vector<std::uint32_t>> rows;
    rows.reserve(m.rows());
    for (auto old_r : row_perm) {
        std::vector<std::uint32_t> row;
        for (auto s : m.row(old_r)) row.push_back(new_col[s]);
        rows.push_back(std::move(row));
    }
    BinaryMatrix out(std::vector<std::string>(region_order.begin(), region_order.end()),
                     std::vector<std::string>(sector_order.begin(), sector_order.end()), std::move(rows), m.year());
    out.pruned_regions = m.pruned_regions;
    out.pruned_sectors = m.pruned_sectors;
    return out;
}

TableWriter edge_list_table(const BinaryMatrix& m) {
    TableWriter out({"region", "sector"});
    out.meta("year", std::to_string(m.year()));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (auto s : m.row(r)) out.row({m.regions()[r], m.sectors()[s]});
    }
    return out;
}

TableWriter dense_grid_table(const BinaryMatrix& m) {
    std::vector<std::string> header{"region"};
    header.insert(header.end(), m.sectors().begin(), m.sectors().end());
    TableWriter out(header);
    out.meta("year", std::to_string(m.year()));
    out.meta("rows", std::to_string(m.rows()));
    out.meta("cols", std::to_string(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        std::vector<std::string> fields(m.cols() + 1, "0");
        fields[0] = m.regions()[r];
        for (auto s : m.row(r)) fields[s + 1] = "1";
        out.row(std::move(fields));
    }
    return out;
}

}  // namespace kuznets
