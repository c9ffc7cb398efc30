#include "mubqkd/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mubqkd {

namespace {

using nlohmann::json;

json field_to_json(const FieldCtx& ctx) {
    return json{{"p", ctx.characteristic()}, {"N", ctx.degree()}, {"modulus", ctx.modulus()}};
}

FieldCtx field_from_json(const json& j) {
    return FieldCtx(j.at("p").get<int>(), j.at("N").get<int>(),
                    j.at("modulus").get<std::vector<int>>());
}

std::string field_comment(const FieldCtx& ctx) {
    std::ostringstream os;
    os << "# field p=" << ctx.characteristic() << " N=" << ctx.degree() << " modulus=[";
    const auto& m = ctx.modulus();
    for (size_t i = 0; i < m.size(); ++i) os << (i ? "," : "") << m[i];
    os << "]\n";
    return os.str();
}

json matrix_to_json(const CMatrix& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c)
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

CMatrix matrix_from_json(const json& rows) {
    const int n = static_cast<int>(rows.size());
    CMatrix m(n, static_cast<int>(rows.at(0).size()));
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < m.cols(); ++c)
            m(r, c) = Cx{rows.at(r).at(c).at(0).get<double>(),
                         rows.at(r).at(c).at(1).get<double>()};
    return m;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    return is;
}

}  // namespace

std::string format_sig12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_mub_json(const std::filesystem::path& path, const MubFamily& family,
                    const MubReport& report) {
    json doc;
    doc["field"] = field_to_json(family.ctx);
    doc["construction"] = construction_name(family.construction);
    doc["d"] = family.d();
    json bases = json::array();
    for (const CMatrix& b : family.bases) bases.push_back(matrix_to_json(b));
    doc["bases"] = std::move(bases);
    doc["verification"] = {{"ok", report.ok},
                           {"worst_unbiased_deviation", report.worst_unbiased_deviation},
                           {"worst_unitarity_deviation", report.worst_unitarity_deviation},
                           {"worst_pair", {report.worst_pair_r, report.worst_pair_s}}};
    open_out(path) << doc.dump(2) << '\n';
}

void write_mub_csv(const std::filesystem::path& path, const MubFamily& family) {
    std::ofstream os = open_out(path);
    os << field_comment(family.ctx);
    os << "r,m,n,re,im\n";
    for (size_t r = 0; r < family.bases.size(); ++r) {
        const CMatrix& b = family.bases[r];
        for (int m = 0; m < b.rows(); ++m)
            for (int n = 0; n < b.cols(); ++n)
                os << r << ',' << m << ',' << n << ',' << format_sig12(b(m, n).real()) << ','
                   << format_sig12(b(m, n).imag()) << '\n';
    }
}

MubFamily read_mub_json(const std::filesystem::path& path) {
    json doc;
    open_in(path) >> doc;
    MubFamily family{field_from_json(doc.at("field")),
                     construction_from_name(doc.at("construction").get<std::string>()),
                     {}};
    for (const json& b : doc.at("bases")) family.bases.push_back(matrix_from_json(b));
    return family;
}

void write_netlist_json(const std::filesystem::path& path, const NetworkLayout& layout) {
    json doc;
    doc["field"] = field_to_json(layout.ctx);
    doc["topology"] =
        layout.topology == Topology::Tree ? "tree" : "tdm";
    doc["switch_mode"] =
        layout.switch_mode == SwitchMode::Passive ? "passive" : "active";
    json stages = json::array();
    for (const StageSpec& s : layout.stages)
        stages.push_back({{"arms", s.arms}, {"delay", s.delay}, {"devices", s.devices}});
    doc["stages"] = std::move(stages);
    doc["inter_stage_delays"] = layout.inter_stage_delays;
    json det = json::array();
    for (size_t n = 0; n < layout.detection_map.size(); ++n)
        det.push_back({{"outcome", n},
                       {"port", layout.detection_map[n].port},
                       {"slot", layout.detection_map[n].slot}});
    doc["detection_map"] = std::move(det);
    doc["device_count"] = layout.device_count;
    doc["loss_factor"] = layout.loss_factor;
    doc["loss_db"] = layout.loss_factor > 0.0 ? -10.0 * std::log10(layout.loss_factor) : 0.0;
    open_out(path) << doc.dump(2) << '\n';
}

void write_povm_csv(const std::filesystem::path& path, const FieldCtx& ctx,
                    const std::vector<CMatrix>& povm) {
    std::ofstream os = open_out(path);
    os << field_comment(ctx);
    os << "n,row,col,re,im\n";
    for (size_t n = 0; n < povm.size(); ++n)
        for (int r = 0; r < povm[n].rows(); ++r)
            for (int c = 0; c < povm[n].cols(); ++c)
                os << n << ',' << r << ',' << c << ',' << format_sig12(povm[n](r, c).real())
                   << ',' << format_sig12(povm[n](r, c).imag()) << '\n';
}

void write_tally_csv(const std::filesystem::path& path, const FieldCtx& ctx,
                     const TallyMatrix& tally) {
    std::ofstream os = open_out(path);
    os << field_comment(ctx);
    os << "r_a,n_a,r_b,n_b,count,prob\n";
    const int d = tally.d;
    for (int r_a = 0; r_a <= d; ++r_a)
        for (int n_a = 0; n_a < d; ++n_a)
            for (int r_b = 0; r_b <= d; ++r_b) {
                std::uint64_t row_total = 0;
                for (int n_b = 0; n_b < d; ++n_b) row_total += tally.at(r_a, n_a, r_b, n_b);
                for (int n_b = 0; n_b < d; ++n_b) {
                    const std::uint64_t c = tally.at(r_a, n_a, r_b, n_b);
                    const double prob =
                        row_total ? static_cast<double>(c) / static_cast<double>(row_total) : 0.0;
                    os << r_a << ',' << n_a << ',' << r_b << ',' << n_b << ',' << c << ','
                       << format_sig12(prob) << '\n';
                }
            }
}

void write_error_stats_json(const std::filesystem::path& path, const FieldCtx& ctx,
                            const ErrorStats& stats) {
    json doc;
    doc["field"] = field_to_json(ctx);
    doc["source"] = stats.source == ErrorStats::Source::Analytic ? "analytic" : "sampled";
    doc["q_z"] = stats.q_z;
    doc["q_r"] = stats.q_r;
    json errors = json::array();
    errors.push_back(stats.symbol_error_z());
    for (int r = 0; r < stats.d(); ++r) errors.push_back(stats.symbol_error(r));
    doc["symbol_errors"] = std::move(errors);
    doc["average_symbol_error"] = stats.average_symbol_error();
    doc["ebar_convention"] = "all d+1 bases";
    open_out(path) << doc.dump(2) << '\n';
}

ErrorStatsFile read_error_stats_json(const std::filesystem::path& path) {
    json doc;
    open_in(path) >> doc;
    ErrorStats stats;
    stats.q_z = doc.at("q_z").get<std::vector<double>>();
    stats.q_r = doc.at("q_r").get<std::vector<std::vector<double>>>();
    stats.source = doc.value("source", std::string("analytic")) == "sampled"
                       ? ErrorStats::Source::Sampled
                       : ErrorStats::Source::Analytic;
    return {field_from_json(doc.at("field")), std::move(stats)};
}

void write_lambda_csv(const std::filesystem::path& path, const FieldCtx& ctx,
                      const LambdaMatrix& lambda) {
    std::ofstream os = open_out(path);
    os << field_comment(ctx);
    os << "j,k,value\n";
    for (int j = 0; j < lambda.d(); ++j)
        for (int k = 0; k < lambda.d(); ++k)
            os << j << ',' << k << ',' << format_sig12(lambda.lambda(j, k)) << '\n';
}

LambdaMatrix read_lambda_csv(const std::filesystem::path& path) {
    std::ifstream is = open_in(path);
    std::string line;
    std::vector<std::tuple<int, int, double>> entries;
    int dmax = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("j,", 0) == 0) continue;
        std::istringstream ls(line);
        int j, k;
        double v;
        char comma;
        if (!(ls >> j >> comma >> k >> comma >> v))
            throw std::runtime_error("malformed lambda CSV row: " + line);
        entries.emplace_back(j, k, v);
        dmax = std::max({dmax, j + 1, k + 1});
    }
    if (entries.empty()) throw std::runtime_error("lambda CSV has no data rows");
    DMatrix lambda(dmax, dmax);
    for (const auto& [j, k, v] : entries) lambda(j, k) = v;
    return make_lambda(std::move(lambda));
}

void write_rate_report_json(const std::filesystem::path& path, const RateReport& report, int d) {
    json doc;
    doc["d"] = d;
    doc["mode"] =
        report.mode == RateMode::FullLambda ? "full-lambda" : "average-error-bound";
    doc["mutual_information"] = report.mutual_information;
    doc["holevo_bound"] = report.holevo_bound;
    doc["key_rate"] = report.key_rate;
    doc["lambda00"] = report.lambda00;
    doc["average_symbol_error"] = report.average_symbol_error;
    doc["ebar_convention"] = "all d+1 bases";
    json clamped = json::array();
    for (const auto& [j, k, v] : report.clamped) clamped.push_back({{"j", j}, {"k", k}, {"value", v}});
    doc["clamped_entries"] = std::move(clamped);
    open_out(path) << doc.dump(2) << '\n';
}

void write_sweep_csv(const std::filesystem::path& path, int d, const std::vector<SweepRow>& rows) {
    std::ofstream os = open_out(path);
    os << "# d=" << d << '\n';
    os << "e_bar,r_two_basis,r_d_plus_1_bound,r_d_plus_1_correlated\n";
    for (const SweepRow& row : rows)
        os << format_sig12(row.e_bar) << ',' << format_sig12(row.rate_two_basis) << ','
           << format_sig12(row.rate_d_plus_1_bound) << ','
           << format_sig12(row.rate_d_plus_1_correlated) << '\n';
}

}  // namespace mubqkd
