#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "coldrec/interactions.hpp"

namespace testing {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("coldrec_" + tag + "_" + std::to_string(rd()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

inline coldrec::InteractionMatrix random_matrix(std::mt19937_64& rng, coldrec::Index users, coldrec::Index items,
                                                double density) {
  std::bernoulli_distribution coin(density);
  std::vector<coldrec::Interaction> pos;
  for (coldrec::Index u = 0; u < users; ++u) {
    for (coldrec::Index i = 0; i < items; ++i) {
      if (coin(rng)) pos.push_back({u, i});
    }
  }
  return coldrec::InteractionMatrix(users, items, pos);
}

}  // namespace testing
