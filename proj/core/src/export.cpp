#include "crm/export.hpp"

#include "crm/errors.hpp"

#include <fstream>
#include <ostream>

namespace crm {

namespace {

std::string species_name(std::size_t idx, std::size_t M) {
    return idx < M ? "C" + std::to_string(idx + 1) : "R" + std::to_string(idx - M + 1);
}

}  // namespace

void write_scan_csv(std::ostream& os, const ScanResult& scan) {
    os << "axis1,axis2,outcome\n";
    const auto old = os.precision(12);
    for (const auto& c : scan.cells) os << c.x1 << ',' << c.x2 << ',' << to_string(c.outcome) << '\n';
    os.precision(old);
}

void write_ssa_csv(std::ostream& os, const ReactionNetwork& net, const std::vector<SsaRun>& runs) {
    os << "seed,time,species,value\n";
    const auto old = os.precision(12);
    const std::size_t M = net.layout().M(), N = net.layout().N();
    for (const auto& run : runs)
        for (std::size_t k = 0; k < run.times.size(); ++k) {
            for (std::size_t i = 0; i < M; ++i)
                os << run.seed << ',' << run.times[k] << ",C" << i + 1 << ','
                   << net.consumer_total(run.samples[k], i) << '\n';
            for (std::size_t l = 0; l < N; ++l)
                os << run.seed << ',' << run.times[k] << ",R" << l + 1 << ','
                   << net.resource_total(run.samples[k], l) << '\n';
        }
    os.precision(old);
}

void write_ensemble_csv(std::ostream& os, const EnsembleSummary& s, std::size_t M) {
    os << "time,species,mean,variance\n";
    const auto old = os.precision(12);
    for (std::size_t k = 0; k < s.times.size(); ++k)
        for (Eigen::Index j = 0; j < s.mean.cols(); ++j)
            os << s.times[k] << ',' << species_name(static_cast<std::size_t>(j), M) << ','
               << s.mean(static_cast<Eigen::Index>(k), j) << ','
               << s.variance(static_cast<Eigen::Index>(k), j) << '\n';
    os.precision(old);
}

void write_ibm_csv(std::ostream& os, const IbmSeries& series) {
    os << "time,species,value\n";
    const auto old = os.precision(12);
    static constexpr const char* names[3] = {"C1", "C2", "R1"};
    for (std::size_t k = 0; k < series.times.size(); ++k)
        for (int j = 0; j < 3; ++j)
            os << series.times[k] << ',' << names[j] << ',' << series.counts[k][static_cast<std::size_t>(j)] << '\n';
    os.precision(old);
}

void write_rank_csv(std::ostream& os, const std::vector<RankEntry>& ranks) {
    os << "rank,species,abundance\n";
    const auto old = os.precision(12);
    for (const auto& r : ranks) os << r.rank << ",C" << r.species + 1 << ',' << r.abundance << '\n';
    os.precision(old);
}

void write_hopf_csv(std::ostream& os, const HopfResult& hopf) {
    os << "d_prime,amplitude\n";
    const auto old = os.precision(12);
    for (const auto& [dp, amp] : hopf.amplitude_samples) os << dp << ',' << amp << '\n';
    os.precision(old);
}

void write_section_csv(std::ostream& os, const std::vector<Vec>& crossings, std::size_t M) {
    if (crossings.empty()) return;
    const auto n = static_cast<std::size_t>(crossings.front().size());
    os << "crossing";
    for (std::size_t j = 0; j < n; ++j) os << ',' << species_name(j, M);
    os << '\n';
    const auto old = os.precision(12);
    for (std::size_t k = 0; k < crossings.size(); ++k) {
        os << k;
        for (std::size_t j = 0; j < n; ++j) os << ',' << crossings[k](static_cast<Eigen::Index>(j));
        os << '\n';
    }
    os.precision(old);
}

void write_file(const std::filesystem::path& file, std::string_view text) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot write " + file.string());
    out << text;
    if (!out) throw Error("write failed: " + file.string());
}

}  // namespace crm
