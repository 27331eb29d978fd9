#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nspmine/seqio.hpp"

namespace nsp {

struct FetchFailure {
  std::string accession;
  std::string reason;
};

struct FetchResult {
  // One entry per successfully resolved input accession, in input order
  // (duplicates in the input appear twice).
  std::vector<SequenceRecord> records;
  std::vector<FetchFailure> failures;
  std::size_t network_requests = 0;
  std::size_t cache_hits = 0;
};

// Environment variable consulted when no endpoint is passed explicitly.
inline constexpr const char* kFetchEndpointEnv = "NSPMINE_FETCH_ENDPOINT";

// Fetches FASTA records by accession. Each accession is requested as
//   GET <endpoint>?db=nuccore&rettype=fasta&retmode=text&id=<accession>
// and cached verbatim at <cache_dir>/<accession>.fasta; a cached accession is
// never requested again. Per-accession failures are collected, not thrown.
FetchResult fetch_accessions(const std::vector<std::string>& accessions,
                             const std::string& endpoint,
                             const std::filesystem::path& cache_dir,
                             const SymbolTable& table);

}  // namespace nsp
