#pragma once

#include "crm/ibm.hpp"
#include "crm/scan.hpp"
#include "crm/ssa.hpp"
#include "crm/stability.hpp"

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace crm {

// axis1,axis2,outcome
void write_scan_csv(std::ostream& os, const ScanResult& scan);

// seed,time,species,value (consumer and resource totals)
void write_ssa_csv(std::ostream& os, const ReactionNetwork& net, const std::vector<SsaRun>& runs);

// time,species,mean,variance
void write_ensemble_csv(std::ostream& os, const EnsembleSummary& summary, std::size_t M);

// time,species,value
void write_ibm_csv(std::ostream& os, const IbmSeries& series);

// rank,species,abundance
void write_rank_csv(std::ostream& os, const std::vector<RankEntry>& ranks);

// d_prime,amplitude
void write_hopf_csv(std::ostream& os, const HopfResult& hopf);

// time,C1..CM,R1..RN of each crossing
void write_section_csv(std::ostream& os, const std::vector<Vec>& crossings, std::size_t M);

// Writes `text` to `file`, creating parent directories.
void write_file(const std::filesystem::path& file, std::string_view text);

}  // namespace crm
