#include "nspmine/fetch.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "httplib.h"
#include "nspmine/error.hpp"

namespace nsp {

namespace {

bool valid_accession(const std::string& acc) {
  if (acc.empty()) return false;
  for (unsigned char c : acc) {
    if (!std::isalnum(c) && c != '.' && c != '_' && c != '-') return false;
  }
  return true;
}

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint '" + url + "' needs a scheme (http:// or https://)");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

FetchResult fetch_accessions(const std::vector<std::string>& accessions,
                             const std::string& endpoint,
                             const std::filesystem::path& cache_dir,
                             const SymbolTable& table) {
  FetchResult result;
  std::filesystem::create_directories(cache_dir);

  std::optional<Endpoint> ep;
  std::unique_ptr<httplib::Client> client;
  auto connect = [&]() -> httplib::Client& {
    if (!client) {
      if (endpoint.empty()) {
        throw ConfigError("no fetch endpoint (pass --endpoint or set " +
                          std::string(kFetchEndpointEnv) + ")");
      }
      ep = split_endpoint(endpoint);
      client = std::make_unique<httplib::Client>(ep->origin);
      client->set_follow_location(true);
      client->set_connection_timeout(10);
      client->set_read_timeout(60);
    }
    return *client;
  };

  // accession -> parsed records, or failure reason
  std::map<std::string, std::vector<SequenceRecord>> resolved;
  std::map<std::string, std::string> failed;

  for (const auto& acc : accessions) {
    if (resolved.count(acc) || failed.count(acc)) continue;
    if (!valid_accession(acc)) {
      failed[acc] = "invalid accession";
      continue;
    }
    const auto cached = cache_dir / (acc + ".fasta");
    std::string text;
    if (std::filesystem::exists(cached)) {
      text = read_file(cached);
      ++result.cache_hits;
    } else {
      auto& cli = connect();
      ++result.network_requests;
      auto res = cli.Get(ep->path + "?db=nuccore&rettype=fasta&retmode=text&id=" + acc);
      if (!res) {
        failed[acc] = "request failed: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status != 200) {
        failed[acc] = "HTTP " + std::to_string(res->status);
        continue;
      }
      text = res->body;
    }
    try {
      auto records = parse_fasta(text, table);
      if (records.empty()) throw ParseError("no FASTA record in response");
      if (!std::filesystem::exists(cached)) {
        std::ofstream out(cached, std::ios::binary);
        out << text;
      }
      resolved[acc] = std::move(records);
    } catch (const ParseError& e) {
      failed[acc] = e.what();
    }
  }

  for (const auto& acc : accessions) {
    if (auto it = resolved.find(acc); it != resolved.end()) {
      result.records.insert(result.records.end(), it->second.begin(), it->second.end());
    } else {
      result.failures.push_back({acc, failed.at(acc)});
    }
  }
  return result;
}

}  // namespace nsp
