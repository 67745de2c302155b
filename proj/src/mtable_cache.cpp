#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <system_error>

#include "fairtopk/fairness_test.hpp"

namespace fairtopk {

namespace {

std::int64_t micro_units(double value) { return std::llround(value * 1e6); }

}  // namespace

MTableCache::MTableCache(std::optional<std::filesystem::path> directory)
    : directory_(std::move(directory)) {
  if (directory_) {
    std::error_code ec;
    std::filesystem::create_directories(*directory_, ec);
    if (ec) directory_.reset();
  }
}

double MTableCache::canonical(double value) {
  return static_cast<double>(micro_units(value)) / 1e6;
}

std::string MTableCache::file_name(int k, double p, double alpha_adj) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "mtable_k%d_p%.6f_a%.6f.csv", k, canonical(p),
                canonical(alpha_adj));
  return buf;
}

std::shared_ptr<const MTable> MTableCache::get(int k, double p, double alpha_adj) {
  const Key key{k, micro_units(p), micro_units(alpha_adj)};
  {
    std::shared_lock lock(mutex_);
    if (const auto it = tables_.find(key); it != tables_.end()) return it->second;
  }

  const double cp = canonical(p);
  const double ca = canonical(alpha_adj);
  std::shared_ptr<const MTable> table;
  if (directory_) {
    std::ifstream in(*directory_ / file_name(k, p, alpha_adj));
    if (in) {
      try {
        auto loaded = read_mtable_csv(in, cp, ca);
        if (loaded.k() == k) table = std::make_shared<const MTable>(std::move(loaded));
      } catch (const std::exception&) {
        // unreadable entry: recompute and overwrite below
      }
    }
  }
  const bool loaded_from_disk = static_cast<bool>(table);
  if (!table) table = std::make_shared<const MTable>(compute_mtable(k, cp, ca));

  std::unique_lock lock(mutex_);
  const auto [it, inserted] = tables_.emplace(key, table);
  if (inserted && directory_ && !loaded_from_disk) {
    const auto final_path = *directory_ / file_name(k, p, alpha_adj);
    auto tmp_path = final_path;
    tmp_path += ".tmp";
    {
      std::ofstream out(tmp_path);
      if (out) write_mtable_csv(out, *table);
    }
    std::error_code ec;
    std::filesystem::rename(tmp_path, final_path, ec);
  }
  return it->second;
}

}  // namespace fairtopk
