#pragma once

#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "photopuf/protocol/fuzzy.hpp"

namespace photopuf::service {

/// Directory of "<record id hex>.pufr" files. Safe for concurrent use.
class RecordStore {
 public:
  explicit RecordStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }

  /// Writes via a temporary file and rename. Replaces an existing record.
  void put(const protocol::EnrollmentRecord& record);
  std::optional<protocol::EnrollmentRecord> get(const protocol::RecordId& id) const;
  bool contains(const protocol::RecordId& id) const;
  std::vector<protocol::RecordId> list() const;

  std::filesystem::path path_for(const protocol::RecordId& id) const;

 private:
  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
};

}  // namespace photopuf::service
