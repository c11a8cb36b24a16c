#include "coldrec/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace coldrec::io {

namespace {

[[noreturn]] void format_error(const fs::path& path, std::size_t line, const std::string& what) {
  throw FormatError(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<Index> parse_index(std::string_view s) {
  s = trim(s);
  Index v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// Lines of a text file, with 1-based numbers; blank lines are skipped.
template <typename Fn>
void for_each_line(const fs::path& path, Fn fn) {
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto t = trim(line);
    if (t.empty()) continue;
    fn(number, t);
  }
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}
void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

class Reader {
 public:
  Reader(const std::string& bytes, std::string origin) : bytes_(bytes), origin_(std::move(origin)) {}
  std::uint64_t u64() { return read_le(8); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(read_le(4)); }
  std::string str(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError(origin_ + ": truncated FMAT data");
  }
  std::uint64_t read_le(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int b = 0; b < width; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  const std::string& bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string() + " (missing or unreadable)");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_binary_atomic(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(std::random_device{}());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("write failed for " + path.string());
    }
  }
  fs::rename(tmp, path);
}

void write_text_atomic(const fs::path& path, const std::string& content) { write_binary_atomic(path, content); }

void build_dir_atomic(const fs::path& target, const std::function<void(const fs::path&)>& fill) {
  fs::path tmp = target;
  tmp += ".partial" + std::to_string(std::random_device{}());
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::create_directories(tmp);
  try {
    fill(tmp);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw;
  }
  if (fs::exists(target)) fs::remove_all(target);
  fs::rename(tmp, target);
}

std::vector<RawRating> read_ratings_csv(const fs::path& path) {
  std::vector<RawRating> out;
  bool header = true;
  for_each_line(path, [&](std::size_t line, std::string_view text) {
    auto fields = split(text, ',');
    if (header) {
      header = false;
      if (fields.size() < 3 || trim(fields[0]) != "user_id" || trim(fields[1]) != "item_id" ||
          trim(fields[2]) != "rating" || fields.size() > 4 || (fields.size() == 4 && trim(fields[3]) != "timestamp")) {
        format_error(path, line, "expected header user_id,item_id,rating[,timestamp]");
      }
      return;
    }
    if (fields.size() != 3 && fields.size() != 4) format_error(path, line, "expected 3 or 4 fields");
    auto rating = parse_double(fields[2]);
    if (!rating || !std::isfinite(*rating)) format_error(path, line, "bad rating '" + fields[2] + "'");
    const std::string user(trim(fields[0]));
    const std::string item(trim(fields[1]));
    if (user.empty() || item.empty()) format_error(path, line, "empty identifier");
    out.push_back({user, item, *rating});
  });
  if (header) format_error(path, 1, "empty file");
  return out;
}

std::string interactions_csv(const InteractionMatrix& m, const IdMap& users, const IdMap& items) {
  std::string out = "user_id,item_id,rating\n";
  for (const auto& p : m.positives()) out += users.id(p.user) + "," + items.id(p.item) + ",1\n";
  return out;
}

std::string idmap_csv(const IdMap& map) {
  std::string out = "index,id\n";
  for (Index i = 0; i < map.size(); ++i) out += std::to_string(i) + "," + map.id(i) + "\n";
  return out;
}

IdMap read_idmap_csv(const fs::path& path) {
  std::vector<std::string> ids;
  bool header = true;
  for_each_line(path, [&](std::size_t line, std::string_view text) {
    if (header) {
      header = false;
      if (text != "index,id") format_error(path, line, "expected header index,id");
      return;
    }
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) format_error(path, line, "expected index,id");
    auto index = parse_index(text.substr(0, comma));
    if (!index || *index != static_cast<Index>(ids.size())) format_error(path, line, "indices must be contiguous from 0");
    ids.emplace_back(trim(text.substr(comma + 1)));
  });
  try {
    return IdMap(std::move(ids));
  } catch (const std::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

namespace {

std::string cold_items_txt(const FoldSplit& f, const IdMap& items) {
  std::string out;
  for (Index i : f.cold_items) out += items.id(i) + "\n";
  return out;
}

void write_text(const fs::path& path, const std::string& s) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << s;
}

}  // namespace

void write_folds(const fs::path& dir, const std::vector<FoldSplit>& folds, const IdMap& users, const IdMap& items) {
  fs::create_directories(dir);
  write_text(dir / "users.csv", idmap_csv(users));
  write_text(dir / "items.csv", idmap_csv(items));
  for (const auto& f : folds) {
    const fs::path sub = dir / ("fold" + std::to_string(f.fold_index));
    fs::create_directories(sub);
    write_text(sub / "train.csv", interactions_csv(f.train, users, items));
    write_text(sub / "warm_test.csv", interactions_csv(f.warm_test, users, items));
    write_text(sub / "cold_test.csv", interactions_csv(f.cold_test, users, items));
    write_text(sub / "cold_items.txt", cold_items_txt(f, items));
  }
}

LoadedFolds read_folds(const fs::path& dir) {
  LoadedFolds out;
  out.users = read_idmap_csv(dir / "users.csv");
  out.items = read_idmap_csv(dir / "items.csv");
  for (int k = 0;; ++k) {
    const fs::path sub = dir / ("fold" + std::to_string(k));
    if (!fs::exists(sub)) break;
    FoldSplit f;
    f.fold_index = k;
    auto load = [&](const char* name) {
      const fs::path p = sub / name;
      const auto raw = read_ratings_csv(p);
      try {
        return binarize_with(raw, out.users, out.items, 1.0);
      } catch (const std::exception& e) {
        throw FormatError(p.string() + ": " + e.what());
      }
    };
    f.train = load("train.csv");
    f.warm_test = load("warm_test.csv");
    f.cold_test = load("cold_test.csv");
    std::vector<char> cold(static_cast<std::size_t>(out.items.size()), 0);
    for_each_line(sub / "cold_items.txt", [&](std::size_t line, std::string_view text) {
      auto idx = out.items.find(std::string(text));
      if (!idx) format_error(sub / "cold_items.txt", line, "unknown item '" + std::string(text) + "'");
      cold[static_cast<std::size_t>(*idx)] = 1;
    });
    for (Index i = 0; i < out.items.size(); ++i) (cold[static_cast<std::size_t>(i)] ? f.cold_items : f.warm_items).push_back(i);
    check_fold_invariants(f);
    out.folds.push_back(std::move(f));
  }
  if (out.folds.empty()) throw std::runtime_error("no fold directories under " + dir.string() + " (expected fold0/)");
  return out;
}

std::string fmat_bytes(const FeatureMatrix& m) {
  if (!m.item_ids.empty() && static_cast<Index>(m.item_ids.size()) != m.n_items()) {
    throw std::invalid_argument("FMAT: id table size differs from row count");
  }
  std::string out = "FMAT";
  put_u32(out, 1);
  put_u64(out, static_cast<std::uint64_t>(m.n_items()));
  put_u64(out, static_cast<std::uint64_t>(m.dim()));
  for (Index r = 0; r < m.n_items(); ++r) {
    const std::string id = m.item_ids.empty() ? std::to_string(r) : m.item_ids[static_cast<std::size_t>(r)];
    put_u32(out, static_cast<std::uint32_t>(id.size()));
    out += id;
  }
  for (Index r = 0; r < m.n_items(); ++r)
    for (Index c = 0; c < m.dim(); ++c) put_u64(out, std::bit_cast<std::uint64_t>(m.values(r, c)));
  return out;
}

FeatureMatrix parse_fmat(const std::string& bytes, const std::string& origin) {
  Reader in(bytes, origin);
  if (in.str(4) != "FMAT") throw FormatError(origin + ": bad FMAT magic");
  if (const auto version = in.u32(); version != 1) {
    throw FormatError(origin + ": unsupported FMAT version " + std::to_string(version));
  }
  const auto rows = static_cast<Index>(in.u64());
  const auto cols = static_cast<Index>(in.u64());
  if (rows < 0 || cols < 0) throw FormatError(origin + ": bad FMAT shape");
  FeatureMatrix m;
  m.item_ids.reserve(static_cast<std::size_t>(rows));
  for (Index r = 0; r < rows; ++r) m.item_ids.push_back(in.str(in.u32()));
  m.values.resize(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m.values(r, c) = std::bit_cast<double>(in.u64());
  if (!in.done()) throw FormatError(origin + ": trailing bytes after FMAT payload");
  return m;
}

void write_fmat(const fs::path& path, const FeatureMatrix& m) { write_binary_atomic(path, fmat_bytes(m)); }

FeatureMatrix read_fmat(const fs::path& path) { return parse_fmat(read_file(path), path.string()); }

std::string feature_csv(const FeatureMatrix& m) {
  std::string out = "item_id";
  for (Index c = 0; c < m.dim(); ++c) out += ",f" + std::to_string(c);
  out += "\n";
  for (Index r = 0; r < m.n_items(); ++r) {
    out += m.item_ids[static_cast<std::size_t>(r)];
    for (Index c = 0; c < m.dim(); ++c) out += "," + format_double(m.values(r, c));
    out += "\n";
  }
  return out;
}

FeatureMatrix read_feature_csv(const fs::path& path) {
  FeatureMatrix m;
  std::vector<std::vector<double>> rows;
  std::size_t dim = 0;
  bool header = true;
  for_each_line(path, [&](std::size_t line, std::string_view text) {
    auto fields = split(text, ',');
    if (header) {
      header = false;
      if (fields.empty() || trim(fields[0]) != "item_id") format_error(path, line, "expected header item_id,f0,...");
      for (std::size_t c = 1; c < fields.size(); ++c) {
        if (trim(fields[c]) != "f" + std::to_string(c - 1)) format_error(path, line, "expected column f" + std::to_string(c - 1));
      }
      dim = fields.size() - 1;
      return;
    }
    if (fields.size() != dim + 1) format_error(path, line, "expected " + std::to_string(dim + 1) + " fields");
    std::vector<double> row(dim);
    for (std::size_t c = 0; c < dim; ++c) {
      auto v = parse_double(fields[c + 1]);
      if (!v || !std::isfinite(*v)) format_error(path, line, "bad value '" + fields[c + 1] + "'");
      row[c] = *v;
    }
    m.item_ids.emplace_back(trim(fields[0]));
    rows.push_back(std::move(row));
  });
  m.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(dim));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < dim; ++c) m.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return m;
}

FeatureMatrix read_features(const fs::path& path) {
  return path.extension() == ".fmat" ? read_fmat(path) : read_feature_csv(path);
}

std::string frames_csv(const RowMatrix& frames) {
  std::string out;
  for (Index r = 0; r < frames.rows(); ++r) {
    for (Index c = 0; c < frames.cols(); ++c) {
      if (c > 0) out += ",";
      out += format_double(frames(r, c));
    }
    out += "\n";
  }
  return out;
}

FrameFeatureMatrix read_frames_csv(const fs::path& path, const std::string& item_id) {
  std::vector<std::vector<double>> rows;
  for_each_line(path, [&](std::size_t line, std::string_view text) {
    auto fields = split(text, ',');
    if (!rows.empty() && fields.size() != rows.front().size()) format_error(path, line, "ragged frame row");
    std::vector<double> row;
    for (const auto& f : fields) {
      auto v = parse_double(f);
      if (!v || !std::isfinite(*v)) format_error(path, line, "bad value '" + f + "'");
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  });
  if (rows.empty()) throw FormatError(path.string() + ": no frames");
  FrameFeatureMatrix f{item_id, RowMatrix(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()))};
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) f.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return f;
}

std::vector<FrameFeatureMatrix> read_frames_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("frame directory " + dir.string() + " does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) { return a.stem().string() < b.stem().string(); });
  std::vector<FrameFeatureMatrix> out;
  for (const auto& p : files) out.push_back(read_frames_csv(p, p.stem().string()));
  return out;
}

std::string genres_csv(const GenreMatrix& g) {
  std::string out = "item_id,genres\n";
  for (Index r = 0; r < g.values.rows(); ++r) {
    out += g.item_ids[static_cast<std::size_t>(r)] + ",";
    bool first = true;
    for (Index c = 0; c < g.values.cols(); ++c) {
      if (g.values(r, c) == 0.0) continue;
      if (!first) out += "|";
      out += g.vocabulary[static_cast<std::size_t>(c)];
      first = false;
    }
    out += "\n";
  }
  return out;
}

std::vector<ItemGenres> read_genres_csv(const fs::path& path) {
  std::vector<ItemGenres> out;
  bool header = true;
  for_each_line(path, [&](std::size_t line, std::string_view text) {
    if (header) {
      header = false;
      if (text != "item_id,genres") format_error(path, line, "expected header item_id,genres");
      return;
    }
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) format_error(path, line, "expected item_id,genres");
    ItemGenres g;
    g.item_id = std::string(trim(text.substr(0, comma)));
    const auto labels = trim(text.substr(comma + 1));
    if (!labels.empty()) {
      for (auto& l : split(labels, '|')) g.genres.emplace_back(trim(l));
    }
    out.push_back(std::move(g));
  });
  return out;
}

nlohmann::json hyper_to_json(const CerHyperParams& h) {
  return {{"latent_dim", h.latent_dim},         {"reg_user", h.reg_user},
          {"reg_item", h.reg_item},             {"reg_proj", h.reg_proj},
          {"base_confidence", h.base_confidence}, {"scaling", h.scaling},
          {"scaled", h.scaled},                 {"max_sweeps", h.max_sweeps},
          {"patience", h.patience},             {"init_scale", h.init_scale},
          {"validation_fraction", h.validation_fraction}, {"seed", h.seed}};
}

CerHyperParams hyper_from_json(const nlohmann::json& j, CerHyperParams h) {
  static const std::set<std::string> known{"latent_dim", "reg_user",   "reg_item", "reg_proj",
                                           "base_confidence", "scaling", "scaled",  "max_sweeps",
                                           "patience", "init_scale", "validation_fraction", "seed",
                                           "features", "warm_items", "best_sweep"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw std::invalid_argument("unknown model key '" + key + "'");
  }
  h.latent_dim = j.value("latent_dim", h.latent_dim);
  h.reg_user = j.value("reg_user", h.reg_user);
  h.reg_item = j.value("reg_item", h.reg_item);
  h.reg_proj = j.value("reg_proj", h.reg_proj);
  h.base_confidence = j.value("base_confidence", h.base_confidence);
  h.scaling = j.value("scaling", h.scaling);
  h.scaled = j.value("scaled", h.scaled);
  h.max_sweeps = j.value("max_sweeps", h.max_sweeps);
  h.patience = j.value("patience", h.patience);
  h.init_scale = j.value("init_scale", h.init_scale);
  h.validation_fraction = j.value("validation_fraction", h.validation_fraction);
  h.seed = j.value("seed", h.seed);
  h.validate();
  return h;
}

namespace {

FeatureMatrix labelled(const RowMatrix& values, const IdMap* ids, const char* prefix) {
  FeatureMatrix m;
  m.values = values;
  for (Index r = 0; r < values.rows(); ++r) {
    m.item_ids.push_back(ids != nullptr && r < ids->size() ? ids->id(r) : prefix + std::to_string(r));
  }
  return m;
}

}  // namespace

void save_model(const fs::path& dir, const CerModel& model, const IdMap* users, const IdMap* items) {
  build_dir_atomic(dir, [&](const fs::path& tmp) {
    auto hyper = hyper_to_json(model.hyper);
    hyper["warm_items"] = model.warm_items;
    hyper["best_sweep"] = model.best_sweep;
    write_text(tmp / "hyper.json", hyper.dump(2) + "\n");
    write_text(tmp / "U.fmat", fmat_bytes(labelled(model.users, users, "")));
    write_text(tmp / "V.fmat", fmat_bytes(labelled(model.items, items, "")));
    write_text(tmp / "W.fmat", fmat_bytes(labelled(model.projection, nullptr, "f")));
    std::string log = "sweep,objective,val_map5\n";
    for (const auto& e : model.training_log) {
      log += std::to_string(e.sweep) + "," + format_double(e.objective) + "," + format_double(e.val_map5) + "\n";
    }
    write_text(tmp / "training_log.csv", log);
  });
}

CerModel load_model(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("model directory " + dir.string() + " does not exist");
  const auto j = nlohmann::json::parse(read_file(dir / "hyper.json"));
  CerModel model;
  model.hyper = hyper_from_json(j);
  model.users = read_fmat(dir / "U.fmat").values;
  model.items = read_fmat(dir / "V.fmat").values;
  model.projection = read_fmat(dir / "W.fmat").values;
  model.warm_items = j.at("warm_items").get<std::vector<Index>>();
  model.best_sweep = j.value("best_sweep", 0);
  model.is_warm.assign(static_cast<std::size_t>(model.items.rows()), 0);
  for (Index i : model.warm_items) model.is_warm.at(static_cast<std::size_t>(i)) = 1;
  bool header = true;
  for_each_line(dir / "training_log.csv", [&](std::size_t line, std::string_view text) {
    if (header) {
      header = false;
      return;
    }
    auto f = split(text, ',');
    auto sweep = f.size() == 3 ? parse_index(f[0]) : std::nullopt;
    auto obj = f.size() == 3 ? parse_double(f[1]) : std::nullopt;
    auto val = f.size() == 3 ? parse_double(f[2]) : std::nullopt;
    if (!sweep || !obj || !val) format_error(dir / "training_log.csv", line, "expected sweep,objective,val_map5");
    model.training_log.push_back({static_cast<int>(*sweep), *obj, *val});
  });
  return model;
}

nlohmann::json report_to_json(const EvaluationReport& r) {
  nlohmann::json j;
  j["scenario"] = std::string(to_string(r.scenario));
  j["cutoffs"] = r.cutoffs;
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"fold", f.fold}, {"n_users", f.n_users}, {"n_distinct_items", f.n_distinct_items}});
  }
  j["folds"] = folds;
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [metric, by_cutoff] : r.summary) {
    for (const auto& [cutoff, s] : by_cutoff) {
      nlohmann::json values = nlohmann::json::array();
      for (const auto& f : r.folds) values.push_back(f.values.at(metric).at(cutoff));
      metrics[metric][std::to_string(cutoff)] = {{"folds", values}, {"mean", s.mean}, {"std", s.std}};
    }
  }
  j["metrics"] = metrics;
  return j;
}

EvaluationReport report_from_json(const nlohmann::json& j) {
  EvaluationReport r;
  r.scenario = parse_scenario(j.at("scenario").get<std::string>());
  r.cutoffs = j.at("cutoffs").get<std::vector<Index>>();
  for (const auto& f : j.at("folds")) {
    FoldMetrics fm;
    fm.fold = f.at("fold").get<int>();
    fm.n_users = f.at("n_users").get<Index>();
    fm.n_distinct_items = f.at("n_distinct_items").get<Index>();
    r.folds.push_back(fm);
  }
  for (const auto& [metric, by_cutoff] : j.at("metrics").items()) {
    for (const auto& [cutoff_text, entry] : by_cutoff.items()) {
      const Index cutoff = std::stoll(cutoff_text);
      const auto values = entry.at("folds").get<std::vector<double>>();
      if (values.size() != r.folds.size()) throw FormatError("report: fold count mismatch for " + metric);
      for (std::size_t k = 0; k < values.size(); ++k) r.folds[k].values[metric][cutoff] = values[k];
      r.summary[metric][cutoff] = {entry.at("mean").get<double>(), entry.at("std").get<double>()};
    }
  }
  return r;
}

std::string report_csv(const EvaluationReport& r) {
  std::string out = "metric,cutoff,fold,value\n";
  for (const auto& [metric, by_cutoff] : r.summary) {
    for (const auto& [cutoff, s] : by_cutoff) {
      for (const auto& f : r.folds) {
        out += metric + "," + std::to_string(cutoff) + "," + std::to_string(f.fold) + "," +
               format_double(f.values.at(metric).at(cutoff)) + "\n";
      }
    }
  }
  return out;
}

namespace {

void check_cutoffs(const std::vector<ReportRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("report: no runs given");
  for (const auto& row : rows) {
    if (row.report.cutoffs != rows.front().report.cutoffs) {
      throw std::invalid_argument("report: run '" + row.label + "' uses different cutoffs from '" + rows.front().label + "'");
    }
  }
}

std::string metric_title(const std::string& metric) {
  if (metric == "map") return "MAP";
  if (metric == "ndcg") return "NDCG";
  if (metric == "intra_list") return "IntraL";
  if (metric == "coverage") return "Cov.";
  if (metric == "entropy") return "SE";
  return metric;
}

}  // namespace

std::string comparison_markdown(const std::vector<ReportRow>& rows) {
  check_cutoffs(rows);
  std::vector<std::pair<std::string, Index>> columns;
  for (std::string_view name : kMetricNames) {
    const std::string metric(name);
    for (Index c : rows.front().report.cutoffs) {
      const bool everywhere = std::all_of(rows.begin(), rows.end(), [&](const ReportRow& r) {
        auto m = r.report.summary.find(metric);
        return m != r.report.summary.end() && m->second.contains(c);
      });
      if (everywhere) columns.emplace_back(metric, c);
    }
  }
  std::string out = "| Run |";
  std::string rule = "|---|";
  for (const auto& [metric, c] : columns) {
    out += " " + metric_title(metric) + "@" + std::to_string(c) + " |";
    rule += "---|";
  }
  out += "\n" + rule + "\n";
  std::vector<double> best(columns.size(), -std::numeric_limits<double>::infinity());
  for (const auto& row : rows)
    for (std::size_t k = 0; k < columns.size(); ++k)
      best[k] = std::max(best[k], row.report.summary.at(columns[k].first).at(columns[k].second).mean);
  for (const auto& row : rows) {
    out += "| " + row.label + " |";
    for (std::size_t k = 0; k < columns.size(); ++k) {
      const double v = row.report.summary.at(columns[k].first).at(columns[k].second).mean;
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4f", v);
      out += v == best[k] ? " **" + std::string(buf) + "** |" : " " + std::string(buf) + " |";
    }
    out += "\n";
  }
  return out;
}

std::string comparison_csv(const std::vector<ReportRow>& rows) {
  check_cutoffs(rows);
  std::string out = "run,metric,cutoff,fold,value\n";
  for (const auto& row : rows) {
    const auto body = report_csv(row.report);
    std::istringstream in(body);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) out += row.label + "," + line + "\n";
  }
  return out;
}

}  // namespace coldrec::io
