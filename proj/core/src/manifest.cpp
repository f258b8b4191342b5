// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pcgnet/errors.hpp"
#include "pcgnet/signal_io.hpp"

namespace fs = std::filesystem;

namespace pcgnet {

std::optional<Label> decode_label(int value) noexcept {
  if (value == 0) return Label::Normal;
  if (value == 1) return Label::Abnormal;
  return std::nullopt;
}

std::string_view to_string(Label l) noexcept {
  return l == Label::Normal ? "normal" : "abnormal";
}

std::string_view to_string(DatasetTag d) noexcept {
  switch (d) {
    case DatasetTag::PhysioNet: return "physionet";
    case DatasetTag::PascalA: return "pascal_a";
    case DatasetTag::PascalB: return "pascal_b";
  }
  return "unknown";
}

std::optional<DatasetTag> parse_dataset_tag(std::string_view s) noexcept {
  if (s == "physionet") return DatasetTag::PhysioNet;
  if (s == "pascal_a") return DatasetTag::PascalA;
  if (s == "pascal_b") return DatasetTag::PascalB;
  return std::nullopt;
}

void DatasetManifest::add(ManifestEntry entry) {
  if (!paths_.insert(entry.path).second) {
    fail(ErrorCode::InvalidConfig, "duplicate manifest path " + entry.path.string());
  }
  (entry.label == Label::Normal ? normal_ : abnormal_) += 1;
  entries_.push_back(std::move(entry));
}

void DatasetManifest::append(const DatasetManifest& other) {
  for (const auto& e : other.entries()) add(e);
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

bool is_wav(const fs::path& p) { return lower(p.extension().string()) == ".wav"; }

std::vector<fs::path> sorted_wavs(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && is_wav(e.path())) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<fs::path> sorted_subdirs(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory()) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// The PhysioNet 2016 release ships REFERENCE.csv files with -1 (normal) and
// 1 (abnormal); anything else (0 in the quality-annotated variant) is the
// "uncertain" class and is excluded.
enum class PhysioLabel { Normal, Abnormal, Uncertain };

std::map<std::string, PhysioLabel> read_physionet_reference(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) fail(ErrorCode::MissingLabelFile, "cannot read " + csv.string());
  std::map<std::string, PhysioLabel> out;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string name, label;
    std::getline(ls, name, ',');
    std::getline(ls, label, ',');
    name = trim(name);
    label = trim(label);
    if (name.empty()) continue;
    PhysioLabel v = PhysioLabel::Uncertain;
    if (label == "-1") v = PhysioLabel::Normal;
    else if (label == "1") v = PhysioLabel::Abnormal;
    out[name] = v;
  }
  return out;
}

fs::path find_reference(const fs::path& dir) {
  for (const char* name : {"REFERENCE.csv", "reference.csv", "REFERENCE-SQI.csv"}) {
    if (fs::is_regular_file(dir / name)) return dir / name;
  }
  return {};
}

void scan_physionet_dir(const fs::path& dir, DatasetManifest& out) {
  const auto wavs = sorted_wavs(dir);
  if (!wavs.empty()) {
    const fs::path ref = find_reference(dir);
    if (ref.empty()) fail(ErrorCode::MissingLabelFile, "no REFERENCE.csv in " + dir.string());
    const auto labels = read_physionet_reference(ref);
    for (const auto& wav : wavs) {
      const std::string id = wav.stem().string();
      const auto it = labels.find(id);
      if (it == labels.end()) {
        fail(ErrorCode::UnlabeledRecording, wav.string() + " is absent from " + ref.string());
      }
      if (it->second == PhysioLabel::Uncertain) continue;
      out.add({wav, it->second == PhysioLabel::Normal ? Label::Normal : Label::Abnormal,
               DatasetTag::PhysioNet, id});
    }
  }
  for (const auto& sub : sorted_subdirs(dir)) scan_physionet_dir(sub, out);
}

// PASCAL class vocabulary across Dataset A and B. Every non-normal category
// is Abnormal; this is what makes Dataset A total 45 normal / 131 abnormal.
std::optional<Label> pascal_class(std::string name) {
  name = lower(std::move(name));
  for (const char* prefix : {"atraining_", "btraining_", "training_"}) {
    if (name.rfind(prefix, 0) == 0) name = name.substr(std::string(prefix).size());
  }
  if (name.rfind("normal", 0) == 0) return Label::Normal;
  for (const char* abn : {"murmur", "extrahls", "extrastole", "extrasystole", "extra", "artifact"}) {
    if (name.rfind(abn, 0) == 0) return Label::Abnormal;
  }
  return std::nullopt;
}

bool is_unlabelled_split(const std::string& name) {
  return lower(name).find("unlabel") != std::string::npos;
}

DatasetTag pascal_subset(const fs::path& root, const fs::path& file) {
  const auto rel = fs::relative(file, root);
  for (const auto& part : rel) {
    const std::string p = lower(part.string());
    if (p == "a" || p == "set_a" || p == "dataset_a" || p == "seta" || p == "dataseta") {
      return DatasetTag::PascalA;
    }
    if (p == "b" || p == "set_b" || p == "dataset_b" || p == "setb" || p == "datasetb") {
      return DatasetTag::PascalB;
    }
  }
  const std::string stem = lower(file.stem().string());
  if (stem.rfind("btraining", 0) == 0 || stem.rfind("bunlabel", 0) == 0) return DatasetTag::PascalB;
  return DatasetTag::PascalA;
}

// Class comes from the nearest ancestor directory that names a class, else
// from a `<class>__` filename prefix (the layout of the original download).
void scan_pascal(const fs::path& root, DatasetManifest& out) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && is_wav(e.path())) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    std::optional<Label> label;
    bool unlabelled = false;
    for (fs::path dir = file.parent_path(); !label && dir != root && dir.has_relative_path();
         dir = dir.parent_path()) {
      unlabelled = unlabelled || is_unlabelled_split(dir.filename().string());
      label = pascal_class(dir.filename().string());
    }
    const std::string stem = file.stem().string();
    if (!label) {
      const auto sep = stem.find("__");
      const std::string prefix = sep == std::string::npos ? stem : stem.substr(0, sep);
      unlabelled = unlabelled || is_unlabelled_split(prefix);
      label = pascal_class(prefix);
    }
    if (!label) {
      if (unlabelled) continue;  // the challenge's unlabelled test splits
      fail(ErrorCode::UnlabeledRecording, "no class for " + file.string());
    }
    const DatasetTag tag = pascal_subset(root, file);
    const std::string id = std::string(tag == DatasetTag::PascalA ? "A_" : "B_") + stem;
    out.add({file, *label, tag, id});
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ls(line);
  while (std::getline(ls, cell, ',')) out.push_back(trim(cell));
  return out;
}

}  // namespace

DatasetManifest build_manifest(std::span<const fs::path> roots, DatasetKind kind) {
  DatasetManifest m;
  for (const auto& root : roots) {
    if (!fs::is_directory(root)) fail(ErrorCode::Io, "not a directory: " + root.string());
    if (kind == DatasetKind::PhysioNet) scan_physionet_dir(root, m);
    else scan_pascal(root, m);
  }
  return m;
}

DatasetManifest build_manifest(const fs::path& root, DatasetKind kind) {
  return build_manifest(std::span<const fs::path>(&root, 1), kind);
}

void write_manifest_csv(const DatasetManifest& m, const fs::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot create " + path.string());
  out << "path,label,dataset,source_id\n";
  for (const auto& e : m.entries()) {
    out << e.path.string() << ',' << encode(e.label) << ',' << to_string(e.dataset) << ','
        << e.source_id << '\n';
  }
}

DatasetManifest read_manifest_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != "path,label,dataset,source_id") {
    fail(ErrorCode::InvalidConfig, "bad manifest header in " + path.string());
  }
  DatasetManifest m;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 4) fail(ErrorCode::InvalidConfig, "bad manifest row: " + line);
    const auto label = cells[1] == "0" ? std::optional(Label::Normal)
                       : cells[1] == "1" ? std::optional(Label::Abnormal)
                                         : std::nullopt;
    const auto tag = parse_dataset_tag(cells[2]);
    if (!label || !tag) fail(ErrorCode::InvalidConfig, "bad manifest row: " + line);
    m.add({cells[0], *label, *tag, cells[3]});
  }
  return m;
}

}  // namespace pcgnet
