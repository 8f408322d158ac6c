#include <cstdint>
#include <fstream>
#include <sstream>

#include "binary_io.hpp"
#include "sparse_rom/errors.hpp"
#include "sparse_rom/providers.hpp"
#include "text_util.hpp"

namespace sparse_rom {

namespace {

constexpr std::string_view kManifestHeader = "sparse_rom_cache 1";

// Manifest lines:
//   sparse_rom_cache 1
//   identity <text>
//   settings <text>
//   length <D>
//   entry <key> <y_1,y_2,...>
struct Manifest {
  std::string identity;
  std::string settings;
  std::size_t length = 0;
  std::map<std::string, std::vector<double>> entries;
};

Manifest read_manifest(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot read " + file.string());
  Manifest m;
  std::string line;
  if (!std::getline(in, line) || line != kManifestHeader) throw StaleCacheError(file.string() + " is not a snapshot cache manifest");
  while (std::getline(in, line)) {
    const auto sp = line.find(' ');
    const std::string tag = line.substr(0, sp);
    const std::string rest = sp == std::string::npos ? std::string() : line.substr(sp + 1);
    if (tag == "identity") {
      m.identity = rest;
    } else if (tag == "settings") {
      m.settings = rest;
    } else if (tag == "length") {
      if (!detail::parse_int(rest, m.length)) throw StaleCacheError("bad length in " + file.string());
    } else if (tag == "entry") {
      const auto sp2 = rest.find(' ');
      std::vector<double> y;
      if (sp2 != std::string::npos) {
        for (const auto& tok : detail::split(std::string_view(rest).substr(sp2 + 1), ',')) {
          double v = 0.0;
          if (!detail::parse_double(tok, v)) throw StaleCacheError("bad entry in " + file.string());
          y.push_back(v);
        }
      }
      m.entries[rest.substr(0, sp2)] = std::move(y);
    } else if (!tag.empty()) {
      throw StaleCacheError("unknown manifest line '" + tag + "' in " + file.string());
    }
  }
  return m;
}

}  // namespace

std::string fingerprint_of(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SnapshotCache::SnapshotCache(std::filesystem::path root, std::string identity, std::string settings, std::size_t output_size)
    : fingerprint_(fingerprint_of(identity)),
      identity_(std::move(identity)),
      settings_(std::move(settings)),
      output_size_(output_size) {
  if (identity_.find('\n') != std::string::npos || settings_.find('\n') != std::string::npos)
    throw InvalidInputError("cache descriptions must be single lines");
  dir_ = std::move(root) / fingerprint_;
  std::filesystem::create_directories(dir_);
  const auto manifest = dir_ / "manifest.txt";
  if (std::filesystem::exists(manifest)) {
    Manifest m = read_manifest(manifest);
    if (m.identity != identity_)
      throw StaleCacheError("cache " + dir_.string() + " belongs to a different study: " + m.identity);
    if (m.settings != settings_)
      throw StaleCacheError("cache " + dir_.string() + " was computed with different solver settings (" + m.settings +
                            "); remove it to recompute");
    if (m.length != output_size_)
      throw StaleCacheError("cache " + dir_.string() + " stores vectors of length " + std::to_string(m.length) +
                            ", expected " + std::to_string(output_size_));
    entries_ = std::move(m.entries);
  } else {
    write_manifest();
  }
}

std::string SnapshotCache::key_of(const MultiIndex& nu) {
  std::string key = "snap";
  for (int e : nu.exponents()) key += "_" + std::to_string(e);
  return key;
}

void SnapshotCache::write_manifest() const {
  std::ostringstream os;
  os << kManifestHeader << "\nidentity " << identity_ << "\nsettings " << settings_ << "\nlength " << output_size_ << '\n';
  for (const auto& [key, y] : entries_) os << "entry " << key << ' ' << detail::join_g17(y) << '\n';
  detail::write_text_atomic(dir_ / "manifest.txt", os.str());
}

std::optional<Eigen::VectorXd> SnapshotCache::get(const MultiIndex& nu, std::span<const double> y) const {
  return get(key_of(nu), y);
}

void SnapshotCache::put(const MultiIndex& nu, const Eigen::VectorXd& v, std::span<const double> y) {
  put(key_of(nu), v, y);
}

std::optional<Eigen::VectorXd> SnapshotCache::get(const std::string& key, std::span<const double> y) const {
  const auto file = dir_ / (key + ".bin");
  {
    std::lock_guard lock(mutex_);
    const auto it = entries_.find(key);
    if (it != entries_.end() && !y.empty() && !it->second.empty()) {
      bool same = it->second.size() == y.size();
      for (std::size_t j = 0; same && j < y.size(); ++j) same = it->second[j] == y[j];
      if (!same)
        throw StaleCacheError("cached snapshot " + key + " was computed at y=(" + detail::join_g17(it->second) +
                              "), requested y=(" + detail::join_g17(y) + ")");
    }
  }
  if (!std::filesystem::exists(file)) return std::nullopt;
  Eigen::VectorXd v = detail::read_f64_le(file);
  if (static_cast<std::size_t>(v.size()) != output_size_)
    throw StaleCacheError("cached snapshot " + file.string() + " has length " + std::to_string(v.size()));
  return v;
}

void SnapshotCache::put(const std::string& key, const Eigen::VectorXd& v, std::span<const double> y) {
  if (static_cast<std::size_t>(v.size()) != output_size_)
    throw DimensionError("snapshot length " + std::to_string(v.size()) + " does not match cache length " +
                         std::to_string(output_size_));
  if (key.empty() || key.find_first_of("/\\ \n") != std::string::npos) throw InvalidInputError("bad cache key '" + key + "'");
  detail::write_f64_le(dir_ / (key + ".bin"), v);
  std::lock_guard lock(mutex_);
  entries_[key] = std::vector<double>(y.begin(), y.end());
  write_manifest();
}

std::size_t SnapshotCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

CachedSnapshotMap::CachedSnapshotMap(const SnapshotMap& inner, std::shared_ptr<SnapshotCache> cache)
    : inner_(inner), cache_(std::move(cache)) {
  if (cache_ && cache_->output_size() != inner_.output_size())
    throw DimensionError("cache length does not match the snapshot map");
}

Eigen::VectorXd CachedSnapshotMap::sample(const MultiIndex& nu, std::span<const double> y) const {
  return sample_key(SnapshotCache::key_of(nu), y);
}

Eigen::VectorXd CachedSnapshotMap::sample_key(const std::string& key, std::span<const double> y) const {
  std::promise<Eigen::VectorXd> promise;
  std::shared_future<Eigen::VectorXd> pending;
  {
    std::lock_guard lock(mutex_);
    const auto it = inflight_.find(key);
    if (it != inflight_.end()) {
      pending = it->second;
    } else {
      inflight_.emplace(key, promise.get_future().share());
    }
  }
  if (pending.valid()) {
    ++hits_;
    return pending.get();
  }
  try {
    std::optional<Eigen::VectorXd> v = cache_ ? cache_->get(key, y) : std::nullopt;
    if (v) {
      ++hits_;
    } else {
      ++misses_;
      v = inner_.evaluate(y);
      if (cache_) cache_->put(key, *v, y);
    }
    promise.set_value(*v);
    return *v;
  } catch (...) {
    promise.set_exception(std::current_exception());
    std::lock_guard lock(mutex_);
    inflight_.erase(key);
    throw;
  }
}

}  // namespace sparse_rom
