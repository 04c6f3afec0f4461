#pragma once

// On-disk cache of automorphism lists, keyed by canonical spec and action.
// Entries are re-verified against the group relations on every load.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "json.hpp"
#include "spaceform/autos.hpp"
#include "spaceform/group_spec.hpp"
#include "spaceform/groups.hpp"

namespace spaceform {

inline constexpr const char* kEngineVersion = "spaceform-engine-1";

inline std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

class AutomorphismCache {
 public:
  explicit AutomorphismCache(std::filesystem::path dir, std::string version = kEngineVersion) : dir_(std::move(dir)), version_(std::move(version)) {}

  const std::filesystem::path& dir() const { return dir_; }

  /// The fixing action (if any) is given as a canonical "a=..,u=..,..." string.
  std::string key(const GroupSpec& spec, const std::string& action) const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(spec.to_string() + "|" + action + "|" + version_)));
    return buf;
  }

  std::filesystem::path path(const GroupSpec& spec, const std::string& action) const { return dir_ / (key(spec, action) + ".json"); }

  /// nullopt on a miss, a version mismatch, or an entry that fails verification
  /// (the last adds a warning).
  std::optional<std::vector<Automorphism>> load(const Group& g, const std::string& action, std::vector<std::string>& warnings) const {
    const auto file = path(*g.spec(), action);
    std::error_code ec;
    if (!std::filesystem::exists(file, ec)) return std::nullopt;
    try {
      std::ifstream in(file);
      const auto j = nlohmann::json::parse(in);
      if (j.at("engine_version").get<std::string>() != version_) return std::nullopt;
      if (j.at("spec").get<std::string>() != g.spec()->to_string() || j.at("action").get<std::string>() != action)
        throw DomainError("spec or action does not match the key");
      std::vector<Automorphism> out;
      for (const auto& images : j.at("automorphisms")) {
        auto phi = complete_automorphism(g, images.get<std::vector<Index>>());
        if (!phi) throw DomainError("stored images do not define an automorphism");
        out.push_back(std::move(*phi));
      }
      if (!std::is_sorted(out.begin(), out.end()) || std::adjacent_find(out.begin(), out.end()) != out.end())
        throw DomainError("stored list is not sorted and duplicate-free");
      return out;
    } catch (const std::exception& e) {
      warnings.push_back("cache entry " + file.filename().string() + " rejected (" + e.what() + "); recomputed");
      return std::nullopt;
    }
  }

  /// Write-then-rename; failures degrade to a warning.
  void store(const Group& g, const std::string& action, const std::vector<Automorphism>& auts, std::vector<std::string>& warnings) const {
    nlohmann::json j;
    j["key"] = key(*g.spec(), action);
    j["spec"] = g.spec()->to_string();
    j["action"] = action;
    j["engine_version"] = version_;
    j["automorphisms"] = nlohmann::json::array();
    for (const auto& phi : auts) j["automorphisms"].push_back(phi.images);
    const auto file = path(*g.spec(), action);
    try {
      std::filesystem::create_directories(dir_);
      std::ostringstream suffix;
      suffix << ".tmp." << ::getpid() << "." << std::hash<std::thread::id>{}(std::this_thread::get_id());
      const auto tmp = std::filesystem::path(file.string() + suffix.str());
      {
        std::ofstream out(tmp);
        out << j.dump() << "\n";
        if (!out) throw std::runtime_error("write failed");
      }
      std::filesystem::rename(tmp, file);
    } catch (const std::exception& e) {
      warnings.push_back("cache write to " + file.string() + " failed (" + e.what() + ")");
    }
  }

 private:
  std::filesystem::path dir_;
  std::string version_;
};

/// Automorphisms of g (those fixing chi when given), through the cache when one
/// is supplied. The result never depends on whether the cache was used.
inline std::vector<Automorphism> cached_automorphisms(const Group& g, const std::optional<Character>& fixing, const std::string& action_key,
                                                     const AutomorphismCache* cache, const AutOptions& options, std::vector<std::string>& warnings) {
  auto fixes = [&](const Automorphism& phi) {
    for (std::size_t s = 0; s < phi.images.size(); ++s)
      if ((*fixing)(phi.images[s]) != fixing->generator_images()[s] % fixing->modulus()) return false;
    return true;
  };
  if (cache && g.spec()) {
    if (auto hit = cache->load(g, action_key, warnings)) {
      if (!fixing || std::all_of(hit->begin(), hit->end(), fixes)) return *hit;
      warnings.push_back("cache entry does not fix the action; recomputed");
    }
  }
  auto auts = fixing ? aut_fixing_action(g, *fixing, options) : enumerate_automorphisms(g, options);
  if (cache && g.spec()) cache->store(g, action_key, auts, warnings);
  return auts;
}

}  // namespace spaceform
