#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mubqkd/mub.hpp"
#include "mubqkd/optics.hpp"
#include "mubqkd/protocol.hpp"
#include "mubqkd/security.hpp"

namespace mubqkd {

// File formats for exported artifacts. Every JSON document carries the
// resolved field context {p, N, modulus}; CSV files carry it as a comment
// header and print numbers to 12 significant digits.

void write_mub_json(const std::filesystem::path& path, const MubFamily& family,
                    const MubReport& report);
void write_mub_csv(const std::filesystem::path& path, const MubFamily& family);
MubFamily read_mub_json(const std::filesystem::path& path);

void write_netlist_json(const std::filesystem::path& path, const NetworkLayout& layout);
void write_povm_csv(const std::filesystem::path& path, const FieldCtx& ctx,
                    const std::vector<CMatrix>& povm);

void write_tally_csv(const std::filesystem::path& path, const FieldCtx& ctx,
                     const TallyMatrix& tally);
void write_error_stats_json(const std::filesystem::path& path, const FieldCtx& ctx,
                            const ErrorStats& stats);

struct ErrorStatsFile {
    FieldCtx ctx;
    ErrorStats stats;
};

ErrorStatsFile read_error_stats_json(const std::filesystem::path& path);

// Lambda CSV rows: j,k,value (with a field comment header on write).
void write_lambda_csv(const std::filesystem::path& path, const FieldCtx& ctx,
                      const LambdaMatrix& lambda);
LambdaMatrix read_lambda_csv(const std::filesystem::path& path);

void write_rate_report_json(const std::filesystem::path& path, const RateReport& report, int d);

struct SweepRow {
    double e_bar;
    double rate_two_basis;
    double rate_d_plus_1_bound;
    double rate_d_plus_1_correlated;
};

void write_sweep_csv(const std::filesystem::path& path, int d, const std::vector<SweepRow>& rows);

std::string format_sig12(double v);

}  // namespace mubqkd
