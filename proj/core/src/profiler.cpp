#include "tqa/profiler.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <openssl/evp.h>

#include "tqa/error.hpp"
#include "tqa/prompts.hpp"
#include "tqa/reply.hpp"
#include "tqa/text.hpp"

namespace tqa::profiler {

void to_json(nlohmann::json& j, const ColumnProfile& p) {
  j = {{"name", p.name},
       {"kind", to_string(p.kind)},
       {"description", p.description},
       {"null_count", p.null_count},
       {"distinct_count", p.distinct_count},
       {"example_values", p.example_values},
       {"min", p.min ? nlohmann::json(*p.min) : nlohmann::json()},
       {"max", p.max ? nlohmann::json(*p.max) : nlohmann::json()}};
}

void from_json(const nlohmann::json& j, ColumnProfile& p) {
  p.name = j.at("name").get<std::string>();
  const auto kind = parse_column_kind(j.at("kind").get<std::string>());
  if (!kind) throw nlohmann::json::other_error::create(501, "unknown column kind", j);
  p.kind = *kind;
  p.description = j.at("description").get<std::string>();
  p.null_count = j.at("null_count").get<std::size_t>();
  p.distinct_count = j.at("distinct_count").get<std::size_t>();
  p.example_values = j.at("example_values").get<std::vector<std::string>>();
  p.min = j.at("min").is_null() ? std::nullopt : std::optional<double>(j["min"].get<double>());
  p.max = j.at("max").is_null() ? std::nullopt : std::optional<double>(j["max"].get<double>());
}

std::vector<ColumnProfile> profile_table(const Table& t, const ProfileOptions& opts) {
  std::vector<ColumnProfile> out;
  out.reserve(t.column_count());
  for (const auto& col : t.columns()) {
    ColumnProfile p;
    p.name = col.name;
    p.kind = col.kind;

    struct Tally {
      std::string text;
      std::size_t count = 0;
    };
    std::unordered_map<std::string, std::size_t> index;
    std::vector<Tally> tallies;
    for (const auto& c : col.cells) {
      if (c.is_missing()) {
        ++p.null_count;
        continue;
      }
      auto [it, inserted] = index.emplace(c.key(), tallies.size());
      if (inserted) tallies.push_back({c.to_text(), 0});
      ++tallies[it->second].count;
      if (col.kind == ColumnKind::Numeric || col.kind == ColumnKind::MixedNumeric) {
        if (auto x = extract_numeric(c)) {
          p.min = p.min ? std::min(*p.min, *x) : *x;
          p.max = p.max ? std::max(*p.max, *x) : *x;
        }
      }
    }
    p.distinct_count = tallies.size();
    std::stable_sort(tallies.begin(), tallies.end(),
                     [](const Tally& a, const Tally& b) { return a.count > b.count; });
    for (std::size_t i = 0; i < tallies.size() && i < opts.example_count; ++i) {
      p.example_values.push_back(tallies[i].text);
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string fallback_description(const ColumnProfile& p) {
  return "Column '" + p.name + "' of type " + std::string(to_string(p.kind)) +
         " with example values: " + text::join(p.example_values, ", ");
}

std::string build_descriptor_prompt(const std::vector<ColumnProfile>& batch, const Table& t) {
  std::string columns;
  for (const auto& p : batch) {
    columns += "- " + p.name + " (type " + std::string(to_string(p.kind)) +
               ", missing " + std::to_string(p.null_count) + ", distinct " +
               std::to_string(p.distinct_count);
    if (p.min) columns += ", min " + text::render_number(*p.min);
    if (p.max) columns += ", max " + text::render_number(*p.max);
    columns += "); frequent values: " + text::join(p.example_values, ", ") + "\n";
  }
  return text::substitute(prompts::kDescriptorUser,
                          {{"table", t.name()}, {"columns", columns}});
}

std::vector<ColumnProfile> describe_columns(std::vector<ColumnProfile> profiles, const Table& t,
                                            llm::LlmClient* llm, const ProfileOptions& opts) {
  const std::size_t batch = std::max<std::size_t>(1, opts.batch_size);
  for (std::size_t start = 0; start < profiles.size(); start += batch) {
    const auto end = std::min(profiles.size(), start + batch);
    std::optional<nlohmann::json> reply;
    if (llm != nullptr) {
      std::vector<ColumnProfile> group(profiles.begin() + static_cast<std::ptrdiff_t>(start),
                                       profiles.begin() + static_cast<std::ptrdiff_t>(end));
      try {
        const auto text = llm->complete(llm::Stage::Descriptor, std::string(prompts::kDescriptorSystem),
                                        build_descriptor_prompt(group, t));
        reply = reply::first_json(reply::strip_code_fences(text), '{');
      } catch (const Error&) {
        reply.reset();
      }
    }
    for (std::size_t i = start; i < end; ++i) {
      auto& p = profiles[i];
      if (reply && reply->contains(p.name) && (*reply)[p.name].is_string() &&
          !text::trim_view((*reply)[p.name].get<std::string>()).empty()) {
        p.description = text::trim((*reply)[p.name].get<std::string>());
      } else {
        p.description = fallback_description(p);
      }
    }
  }
  return profiles;
}

std::string fingerprint(std::string_view csv_bytes, std::string_view version) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, csv_bytes.data(), csv_bytes.size());
  EVP_DigestUpdate(ctx, version.data(), version.size());
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string fingerprint_file(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw CsvError("cannot read '" + csv_path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return fingerprint(buf.str());
}

ProfileCache::ProfileCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path ProfileCache::path_for(const std::string& fp) const {
  return dir_ / (fp + ".json");
}

std::optional<std::vector<ColumnProfile>> ProfileCache::get(const std::string& fp) const {
  const auto path = path_for(fp);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    return nlohmann::json::parse(in).get<std::vector<ColumnProfile>>();
  } catch (const nlohmann::json::exception&) {
    in.close();
    std::error_code ec;
    std::filesystem::remove(path, ec);
    return std::nullopt;
  }
}

void ProfileCache::put(const std::string& fp, const std::vector<ColumnProfile>& profiles) const {
  std::filesystem::create_directories(dir_);
  const auto path = path_for(fp);
  auto tmp = path;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write profile cache entry '" + tmp.string() + "'");
    out << nlohmann::json(profiles).dump(2);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace tqa::profiler
