#include "photopuf/service/record_store.hpp"

#include <mutex>

#include "photopuf/common/errors.hpp"

namespace photopuf::service {

namespace fs = std::filesystem;

RecordStore::RecordStore(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

fs::path RecordStore::path_for(const protocol::RecordId& id) const {
  return dir_ / (protocol::to_hex(id) + ".pufr");
}

void RecordStore::put(const protocol::EnrollmentRecord& record) {
  std::unique_lock lock(mutex_);
  const auto final_path = path_for(record.record_id);
  auto tmp = final_path;
  tmp += ".tmp";
  protocol::save_record(tmp.string(), record);
  fs::rename(tmp, final_path);
}

std::optional<protocol::EnrollmentRecord> RecordStore::get(const protocol::RecordId& id) const {
  std::shared_lock lock(mutex_);
  const auto p = path_for(id);
  if (!fs::exists(p)) return std::nullopt;
  return protocol::load_record(p.string());
}

bool RecordStore::contains(const protocol::RecordId& id) const {
  std::shared_lock lock(mutex_);
  return fs::exists(path_for(id));
}

std::vector<protocol::RecordId> RecordStore::list() const {
  std::shared_lock lock(mutex_);
  std::vector<protocol::RecordId> ids;
  for (const auto& e : fs::directory_iterator(dir_)) {
    if (e.path().extension() != ".pufr") continue;
    const auto stem = e.path().stem().string();
    if (stem.size() != 32) continue;
    try {
      const auto b = from_hex(stem);
      protocol::RecordId id{};
      std::copy(b.begin(), b.end(), id.begin());
      ids.push_back(id);
    } catch (const std::exception&) {
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace photopuf::service
