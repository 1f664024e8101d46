// lvtool: synthetic data, feature extraction, cross-validation grids and ANN sweeps.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lv/ann.hpp"
#include "lv/classifiers.hpp"
#include "lv/config.hpp"
#include "lv/eval.hpp"
#include "lv/features.hpp"
#include "lv/parallel.hpp"
#include "lv/synth.hpp"

namespace fs = std::filesystem;

namespace {

// Bad flag values that CLI11 cannot see (exit 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataOptions {
  std::string manifest;
  std::string features;
  std::string desc = "approxcanny";
  int cell = 0;
  int resize = 40;
  std::optional<double> edge_high;
  std::optional<double> edge_low;
  std::optional<double> edge_threshold;
};

struct GridColumn {
  lv::Descriptor descriptor;
  const char* title;
};

const std::vector<GridColumn> kEdgeGrid = {
    {lv::Descriptor::EdgeCanny, "Canny"},     {lv::Descriptor::EdgePrewitt, "Prewitt"},
    {lv::Descriptor::EdgeSobel, "Sobel"},     {lv::Descriptor::EdgeRoberts, "Roberts"},
    {lv::Descriptor::EdgeLog, "LoG"},         {lv::Descriptor::EdgeApproxCanny, "ApproxCanny"},
};

const std::vector<GridColumn> kStatGrid = {
    {lv::Descriptor::Hpiv, "HPIV"},           {lv::Descriptor::Hog8, "HOG[8 8]"},
    {lv::Descriptor::Hog10, "HOG[10 10]"},    {lv::Descriptor::Lbp8, "LBP[8 8]"},
    {lv::Descriptor::Lbp16, "LBP[16 16]"},    {lv::Descriptor::Lbp32, "LBP[32 32]"},
};

lv::Descriptor resolve_descriptor(std::string name, int cell) {
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
  if (name.rfind("edge-", 0) == 0) name.erase(0, 5);
  if (auto m = lv::edge_method_from_name(name)) return lv::edge_descriptor(*m);
  if (name == "hpiv") return lv::Descriptor::Hpiv;
  if (name == "hog") {
    if (cell == 0 || cell == 8) return lv::Descriptor::Hog8;
    if (cell == 10) return lv::Descriptor::Hog10;
    throw UsageError("hog supports --cell 8 or 10");
  }
  if (name == "lbp") {
    if (cell == 0 || cell == 8) return lv::Descriptor::Lbp8;
    if (cell == 16) return lv::Descriptor::Lbp16;
    if (cell == 32) return lv::Descriptor::Lbp32;
    throw UsageError("lbp supports --cell 8, 16 or 32");
  }
  if (auto d = lv::descriptor_from_name(name)) return *d;
  throw UsageError("unknown descriptor '" + name +
                   "'; valid: canny, prewitt, sobel, roberts, log, approxcanny, hpiv, hog, lbp");
}

lv::ClassifierSpec resolve_classifier(const std::string& name) {
  if (auto s = lv::classifier_by_name(name)) return *s;
  throw UsageError("unknown classifier '" + name + "'; valid: " + lv::classifier_names());
}

lv::DescriptorSpec descriptor_spec(const DataOptions& o, lv::Descriptor d) {
  lv::DescriptorSpec s;
  s.descriptor = d;
  s.resize = o.resize;
  s.edge.high_fraction = o.edge_high;
  s.edge.low_fraction = o.edge_low;
  s.edge.gradient_threshold = o.edge_threshold;
  s.edge.log_threshold = o.edge_threshold;
  try {
    s.edge.validate();
  } catch (const lv::Error& e) {
    throw UsageError(e.what());
  }
  return s;
}

void add_data_options(CLI::App* sub, DataOptions& o, bool allow_features) {
  sub->add_option("--manifest", o.manifest, "Manifest CSV (path,label)");
  if (allow_features) sub->add_option("--features", o.features, "Precomputed feature file (.csv or .bin)");
  sub->add_option("--desc", o.desc, "Descriptor: canny|prewitt|sobel|roberts|log|approxcanny|hpiv|hog|lbp")
      ->capture_default_str();
  sub->add_option("--cell", o.cell, "Cell size for hog (8|10) and lbp (8|16|32)");
  sub->add_option("--resize", o.resize, "Resize every image to NxN first (0 keeps native size)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--edge-high", o.edge_high, "Canny high threshold as a fraction of max gradient");
  sub->add_option("--edge-low", o.edge_low, "Canny low threshold as a fraction of max gradient");
  sub->add_option("--edge-threshold", o.edge_threshold, "Absolute threshold for gradient and LoG detectors");
}

void add_jobs(CLI::App* sub, unsigned& jobs) {
  sub->add_option("--jobs", jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
}

lv::Dataset load_features(const fs::path& path) {
  if (path.extension() == ".bin") return lv::parse_feature_binary(lv::read_text_file(path));
  return lv::read_feature_csv(path);
}

lv::Dataset build_from_manifest(const lv::LoadedImages& img, const lv::DescriptorSpec& spec) {
  return lv::build_dataset(img.images, img.labels, img.ids, spec);
}

lv::Dataset load_dataset(const DataOptions& o) {
  if (!o.features.empty() && !o.manifest.empty()) throw UsageError("give either --manifest or --features, not both");
  if (!o.features.empty()) return load_features(o.features);
  if (o.manifest.empty()) throw UsageError("a dataset is required: --manifest or --features");
  const auto spec = descriptor_spec(o, resolve_descriptor(o.desc, o.cell));
  return build_from_manifest(lv::load_manifest(o.manifest), spec);
}

std::string column_title(const lv::Dataset& d) {
  return d.descriptor ? std::string(lv::descriptor_name(*d.descriptor)) : std::string("features");
}

void dump_edge_maps(const lv::LoadedImages& img, lv::EdgeMethod method, const lv::DescriptorSpec& spec,
                    const fs::path& dir) {
  for (std::size_t i = 0; i < img.images.size(); ++i) {
    const auto map = lv::detect_edges(lv::prepare(img.images[i], spec.resize), method, spec.edge);
    const auto stem = fs::path(img.ids[i]).stem().string();
    lv::write_file_atomic(dir / (stem + "_" + std::string(lv::edge_method_name(method)) + ".pgm"),
                          lv::encode_pgm(map.to_image()));
  }
}

// --- synth ------------------------------------------------------------------

struct SynthArgs {
  std::size_t n = 0;
  double defect_frac = 0.1997;
  std::uint64_t seed = 0;
  std::string out;
  std::string stats;
  int size = 400;
};

int run_synth(const SynthArgs& a) {
  lv::DefectStats stats;
  if (!a.stats.empty()) stats = lv::DefectStats::parse(lv::read_text_file(a.stats));
  lv::GeneratorParams params;
  params.size = a.size;
  const auto m = lv::gen_dataset(a.seed, a.n, a.defect_frac, a.out, stats, params);
  std::size_t defects = 0;
  for (const auto& e : m.entries) defects += static_cast<std::size_t>(e.label);
  std::cout << "wrote " << m.size() << " patches (" << defects << " defect) to " << a.out << "\n";
  return 0;
}

// --- extract ----------------------------------------------------------------

struct ExtractArgs {
  DataOptions data;
  std::string out;
  std::string format;
  std::string dump_edges;
};

int run_extract(const ExtractArgs& a) {
  if (a.data.manifest.empty()) throw UsageError("--manifest is required");
  const auto desc = resolve_descriptor(a.data.desc, a.data.cell);
  const auto spec = descriptor_spec(a.data, desc);
  const auto img = lv::load_manifest(a.data.manifest);
  const auto d = build_from_manifest(img, spec);
  const bool binary = a.format == "bin" || (a.format.empty() && fs::path(a.out).extension() == ".bin");
  lv::write_file_atomic(a.out, binary ? lv::feature_binary(d) : lv::feature_csv(d));
  if (!a.dump_edges.empty()) {
    if (!lv::is_edge_descriptor(desc)) throw UsageError("--dump-edges needs an edge descriptor");
    dump_edge_maps(img, lv::edge_method_of(desc), spec, a.dump_edges);
  }
  std::cout << d.size() << " samples x " << d.dims() << " features (" << lv::descriptor_name(desc) << ") -> "
            << a.out << "\n";
  return 0;
}

// --- cv ---------------------------------------------------------------------

struct CvArgs {
  DataOptions data;
  std::string classifier = "fine-gaussian-svm";
  std::string grid;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  std::string out;
  std::string save_model;
  unsigned jobs = lv::default_threads();
};

std::string confusion_row(const std::string& classifier, const std::string& desc, const lv::ConfusionMatrix& c) {
  return classifier + "," + desc + "," + std::to_string(c.tn) + "," + std::to_string(c.fp) + "," +
         std::to_string(c.fn) + "," + std::to_string(c.tp) + "\n";
}

int run_cv_grid(const CvArgs& a) {
  if (a.data.manifest.empty()) throw UsageError("--grid needs --manifest");
  if (!a.data.features.empty()) throw UsageError("--grid extracts its own features; drop --features");
  const auto& columns = a.grid == "edge" ? kEdgeGrid : kStatGrid;
  const auto& rows = lv::table_classifiers();
  const auto img = lv::load_manifest(a.data.manifest);

  std::vector<lv::DescriptorSpec> specs;
  for (const auto& c : columns) specs.push_back(descriptor_spec(a.data, c.descriptor));
  std::vector<lv::Dataset> sets(columns.size());
  lv::parallel_for(columns.size(), a.jobs, [&](std::size_t j) { sets[j] = build_from_manifest(img, specs[j]); });

  std::vector<std::string> row_names, col_names;
  for (const auto& r : rows) row_names.push_back(r.label);
  for (const auto& c : columns) col_names.push_back(c.title);
  lv::ResultsTable table(row_names, col_names);
  std::vector<lv::ConfusionMatrix> cms(rows.size() * columns.size());

  const auto t0 = std::chrono::steady_clock::now();
  lv::parallel_for(cms.size(), a.jobs, [&](std::size_t cell) {
    const auto i = cell / columns.size();
    const auto j = cell % columns.size();
    try {
      const auto r = lv::cross_validate(sets[j], rows[i], a.folds, a.seed, 1);
      table.values[i][j] = r.accuracy;
      cms[cell] = r.confusion;
    } catch (const lv::Error& e) {
      std::cerr << "cell " << rows[i].label << " / " << columns[j].title << " failed: " << e.what() << "\n";
    }
  });
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::string conf = "classifier,descriptor,tn,fp,fn,tp\n";
  for (std::size_t cell = 0; cell < cms.size(); ++cell)
    conf += confusion_row(rows[cell / columns.size()].label, columns[cell % columns.size()].title, cms[cell]);
  const fs::path out = a.out;
  lv::write_file_atomic(out / "results.csv", table.to_csv());
  lv::write_file_atomic(out / "confusion.csv", conf);
  std::cout << table.to_csv();
  std::fprintf(stderr, "%zu cells in %.1f s\n", cms.size(), secs);
  return 0;
}

int run_cv(const CvArgs& a) {
  if (!a.grid.empty()) return run_cv_grid(a);
  const auto spec = resolve_classifier(a.classifier);
  const auto d = load_dataset(a.data);
  const auto r = lv::cross_validate(d, spec, a.folds, a.seed, a.jobs);

  const fs::path out = a.out;
  std::string results = "classifier,descriptor,folds,accuracy";
  for (std::size_t f = 0; f < r.per_fold.size(); ++f) results += ",fold" + std::to_string(f + 1);
  results += "\n" + spec.label + "," + column_title(d) + "," + std::to_string(a.folds) + "," +
             lv::format_fixed(100.0 * r.accuracy, 2);
  for (double acc : r.per_fold) results += "," + lv::format_fixed(100.0 * acc, 2);
  results += "\n";
  lv::write_file_atomic(out / "results.csv", results);
  lv::write_file_atomic(out / "confusion.csv", lv::confusion_csv(r.confusion));
  lv::write_file_atomic(out / "scores.csv", lv::scores_csv(d, r.scores));
  if (r.roc) lv::write_file_atomic(out / "roc.csv", lv::roc_csv(*r.roc));
  if (!a.save_model.empty())
    lv::write_file_atomic(a.save_model, lv::serialize_model(*lv::train_classifier(d, spec, a.seed)));

  std::cout << spec.label << " on " << column_title(d) << ": " << lv::format_fixed(100.0 * r.accuracy, 2)
            << "% (tn " << r.confusion.tn << ", fp " << r.confusion.fp << ", fn " << r.confusion.fn << ", tp "
            << r.confusion.tp << ")";
  if (r.roc) std::cout << ", AUC " << lv::format_fixed(r.roc->auc(), 4);
  std::cout << "\n";
  return 0;
}

// --- ann-sweep --------------------------------------------------------------

struct AnnArgs {
  DataOptions data;
  int hidden = 0;
  std::string split;
  int epochs = 200;
  std::string activation = "relu";
  std::string output = "sigmoid";
  double lr = 1e-3;
  int batch = 0;
  std::uint64_t seed = 0;
  std::string out;
  unsigned jobs = lv::default_threads();
};

int parse_split(std::string s) {
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  const auto slash = s.find('/');
  const auto head = s.substr(0, slash);
  int train = 0;
  try {
    train = static_cast<int>(lv::parse_long(head));
    if (slash != std::string::npos && lv::parse_long(s.substr(slash + 1)) != 100 - train) train = -1;
  } catch (const lv::Error&) {
    train = -1;
  }
  if (!lv::valid_ann_split(train))
    throw UsageError("invalid split '" + s + "'; valid: 70/30, 75/25, 80/20, 85/15, 90/10, 95/5");
  return train;
}

int run_ann_sweep(const AnnArgs& a) {
  std::vector<int> hidden(std::begin(lv::kAnnHidden), std::end(lv::kAnnHidden));
  std::vector<int> splits(std::begin(lv::kAnnSplits), std::end(lv::kAnnSplits));
  if (a.hidden > 0) hidden = {a.hidden};
  if (!a.split.empty()) splits = {parse_split(a.split)};

  lv::AnnConfig cfg;
  cfg.epochs = a.epochs;
  cfg.hidden_activation = a.activation == "tansig" ? lv::HiddenActivation::Tansig : lv::HiddenActivation::Relu;
  if (a.output == "softmax") {
    cfg.output = 2;
    cfg.output_activation = lv::OutputActivation::Softmax;
  }
  cfg.adam.lr = a.lr;
  cfg.batch_size = a.batch;
  cfg.seed = a.seed;

  auto data = a.data;
  if (data.features.empty() && data.manifest.empty()) throw UsageError("a dataset is required: --manifest or --features");
  const auto d = load_dataset(data);
  const auto cells = lv::ann_sweep(d, cfg, hidden, splits, a.jobs);

  std::string grid = "neurons";
  for (int s : splits) grid += "," + lv::split_name(s);
  grid += "\n";
  std::string detail = "neurons,split,test_accuracy,train_accuracy,tn,fp,fn,tp,final_loss\n";
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    grid += std::to_string(hidden[i]);
    for (std::size_t j = 0; j < splits.size(); ++j) {
      const auto& c = cells[i * splits.size() + j];
      const auto& cm = c.run.test.confusion;
      grid += "," + lv::format_fixed(100.0 * c.run.test.accuracy, 2);
      detail += std::to_string(c.hidden) + "," + lv::split_name(c.train_percent) + "," +
                lv::format_fixed(100.0 * c.run.test.accuracy, 2) + "," +
                lv::format_fixed(100.0 * c.run.train.accuracy, 2) + "," + std::to_string(cm.tn) + "," +
                std::to_string(cm.fp) + "," + std::to_string(cm.fn) + "," + std::to_string(cm.tp) + "," +
                (c.run.epoch_loss.empty() ? std::string("NA") : lv::format_double(c.run.epoch_loss.back())) + "\n";
    }
    grid += "\n";
  }

  const fs::path out = a.out;
  lv::write_file_atomic(out / "sweep.csv", grid);
  lv::write_file_atomic(out / "cells.csv", detail);
  if (cells.size() == 1) {
    const auto& run = cells[0].run;
    lv::write_file_atomic(out / "confusion.csv", lv::confusion_csv(run.test.confusion));
    if (run.train.roc) lv::write_file_atomic(out / "roc_train.csv", lv::roc_csv(*run.train.roc));
    if (run.test.roc) lv::write_file_atomic(out / "roc_test.csv", lv::roc_csv(*run.test.roc));
  }
  std::cout << grid;
  return 0;
}

// --- roc --------------------------------------------------------------------

int run_roc(const std::string& scores, const std::string& out) {
  const auto lines = lv::read_lines(scores);
  if (lines.empty()) lv::fail(lv::Errc::CorruptData, "empty scores file");
  const auto header = lv::split(lines[0], ',');
  const auto col = [&](std::string_view name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) lv::fail(lv::Errc::CorruptData, "scores file lacks a '" + std::string(name) + "' column");
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto li = col("label");
  const auto si = col("score");
  std::vector<int> labels;
  std::vector<double> values;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = lv::split(lines[i], ',');
    if (f.size() != header.size()) lv::fail(lv::Errc::CorruptData, "line " + std::to_string(i + 1) + ": field count");
    if (f[li] != "0" && f[li] != "1") lv::fail(lv::Errc::BadLabel, "line " + std::to_string(i + 1));
    labels.push_back(f[li] == "1" ? 1 : 0);
    values.push_back(lv::parse_double(f[si]));
  }
  const auto curve = lv::roc(labels, values);
  lv::write_file_atomic(out, lv::roc_csv(curve));
  std::cout << "AUC " << lv::format_fixed(curve.auc(), 4) << " over " << labels.size() << " samples\n";
  return 0;
}

// --- dump-edges -------------------------------------------------------------

struct DumpArgs {
  DataOptions data;
  std::string image;
  std::string out;
};

int run_dump_edges(const DumpArgs& a) {
  const auto desc = resolve_descriptor(a.data.desc, 0);
  if (!lv::is_edge_descriptor(desc)) throw UsageError("dump-edges needs an edge method");
  const auto spec = descriptor_spec(a.data, desc);
  lv::LoadedImages img;
  if (!a.image.empty() == !a.data.manifest.empty()) throw UsageError("give exactly one of --image or --manifest");
  if (!a.image.empty()) {
    img.images.push_back(lv::load_image(a.image));
    img.labels.push_back(0);
    img.ids.push_back(fs::path(a.image).filename().string());
  } else {
    img = lv::load_manifest(a.data.manifest);
  }
  if (img.images.empty()) lv::fail(lv::Errc::EmptyDataset, "empty dataset");
  dump_edge_maps(img, lv::edge_method_of(desc), spec, a.out);
  std::cout << "wrote " << img.images.size() << " edge maps to " << a.out << "\n";
  return 0;
}

// Pulls `--config FILE` out of argv and splices the file's flags in right after
// the subcommand name, so flags typed on the command line come later and win.
std::vector<std::string> apply_config(CLI::App& app, std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return args;
  const auto cfg = lv::ConfigFile::load(path);
  for (std::size_t i = 0; i < args.size(); ++i) {
    auto* sub = app.get_subcommand_no_throw(args[i]);
    if (sub == nullptr) continue;
    const auto tokens = lv::config_tokens(
        cfg, [&](std::string_view flag) { return sub->get_option_no_throw(std::string(flag)) != nullptr; });
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(i + 1), tokens.begin(), tokens.end());
    break;
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leather patch defect classification: data, features, classifiers, evaluation"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  std::string config_path;
  app.add_option("--config", config_path, "Flat key=value file (e.g. descriptor.name=hog); flags override it");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic patch set and manifest");
  s->add_option("--n", synth.n, "Number of patches")->required();
  s->add_option("--defect-frac", synth.defect_frac, "Fraction of defect patches")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  s->add_option("--seed", synth.seed, "Seed")->capture_default_str();
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("--stats", synth.stats, "Defect size statistics file (x.q1=16 style lines)");
  s->add_option("--size", synth.size, "Patch side in pixels")->capture_default_str()->check(CLI::PositiveNumber);

  ExtractArgs extract;
  auto* e = app.add_subcommand("extract", "Apply one descriptor to a manifest");
  add_data_options(e, extract.data, false);
  e->add_option("--out", extract.out, "Feature file")->required();
  e->add_option("--format", extract.format, "csv or bin (default from extension)")
      ->check(CLI::IsMember({"csv", "bin"}));
  e->add_option("--dump-edges", extract.dump_edges, "Also write the binary edge maps here");

  CvArgs cv;
  auto* c = app.add_subcommand("cv", "Stratified k-fold cross-validation of one cell or a full grid");
  add_data_options(c, cv.data, true);
  c->add_option("--classifier", cv.classifier, "Classifier name")->capture_default_str();
  c->add_option("--grid", cv.grid, "Run every table classifier over the edge or stat descriptors")
      ->check(CLI::IsMember({"edge", "stat"}));
  c->add_option("--folds", cv.folds, "Number of folds")->capture_default_str()->check(CLI::Range(2, 1000000));
  c->add_option("--seed", cv.seed, "Seed")->capture_default_str();
  c->add_option("--out", cv.out, "Output directory")->required();
  c->add_option("--save-model", cv.save_model, "Also fit on all rows and save the model here");
  add_jobs(c, cv.jobs);

  AnnArgs ann;
  auto* n = app.add_subcommand("ann-sweep", "Train the one-hidden-layer network over neuron counts and splits");
  add_data_options(n, ann.data, true);
  n->add_option("--g", ann.hidden, "Hidden neurons (default: 60, 50, 40, 30)")->check(CLI::PositiveNumber);
  n->add_option("--split", ann.split, "Train/test split such as 75 or 75/25 (default: all six)");
  n->add_option("--epochs", ann.epochs, "Training epochs")->capture_default_str()->check(CLI::NonNegativeNumber);
  n->add_option("--activation", ann.activation, "Hidden activation")
      ->capture_default_str()
      ->check(CLI::IsMember({"relu", "tansig"}));
  n->add_option("--output", ann.output, "Output layer")
      ->capture_default_str()
      ->check(CLI::IsMember({"sigmoid", "softmax"}));
  n->add_option("--lr", ann.lr, "Adam learning rate")->capture_default_str()->check(CLI::PositiveNumber);
  n->add_option("--batch", ann.batch, "Minibatch size (0: full batch up to 4096 rows, else 128)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  n->add_option("--seed", ann.seed, "Seed")->capture_default_str();
  n->add_option("--out", ann.out, "Output directory")->required();
  add_jobs(n, ann.jobs);

  std::string roc_scores, roc_out;
  auto* r = app.add_subcommand("roc", "ROC points from a scores CSV (label and score columns)");
  r->add_option("--scores", roc_scores, "Scores CSV")->required();
  r->add_option("--out", roc_out, "ROC CSV")->required();

  DumpArgs dump;
  auto* d = app.add_subcommand("dump-edges", "Write the binary edge maps as PGM images");
  add_data_options(d, dump.data, false);
  d->add_option("--image", dump.image, "Single input image");
  d->add_option("--out", dump.out, "Output directory")->required();

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
      args = apply_config(app, std::move(args));
    } catch (const lv::Error& err) {
      if (err.code() == lv::Errc::NotFound) throw;
      throw UsageError(err.what());
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? 0 : 2;
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    if (active == s) return run_synth(synth);
    if (active == e) return run_extract(extract);
    if (active == c) return run_cv(cv);
    if (active == n) return run_ann_sweep(ann);
    if (active == r) return run_roc(roc_scores, roc_out);
    return run_dump_edges(dump);
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << "\n\n" << active->help();
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
