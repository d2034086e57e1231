// mpi-stereo: planar-to-stereo conversion CLI built on the MPI engine.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mpis/archive.hpp"
#include "mpis/builder.hpp"
#include "mpis/dibr.hpp"
#include "mpis/geometry.hpp"
#include "mpis/image_io.hpp"
#include "mpis/metrics.hpp"
#include "mpis/net.hpp"
#include "mpis/parallel.hpp"
#include "mpis/render.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct JobConfig {
  std::string input;
  std::string depth;
  std::string weights;
  std::string output = "out";
  std::string mode = "classical";
  std::string layout = "pair";  // pair | sbs
  std::string direction = "left-to-right";
  int nPlanes = 16;
  double dMin = 0.0;
  double dMax = 1.0;
  double maxDisparityPx = 16.0;
  int factor = 4;
  bool inpaint = true;
  bool tent = false;
};

mpis::CameraRig makeRig(const JobConfig& cfg) {
  mpis::CameraRig rig;
  rig.shiftScale = static_cast<float>(cfg.maxDisparityPx / cfg.dMax);
  rig.direction = cfg.direction == "right-to-left"
                      ? mpis::BaselineDirection::RightToLeft
                      : mpis::BaselineDirection::LeftToRight;
  return rig;
}

std::vector<std::string> listFrames(const std::string& input) {
  if (fs::is_directory(input)) {
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(input)) {
      std::string ext = e.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
      if (ext == ".png" || ext == ".ppm" || ext == ".pfm")
        files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
    return files;
  }
  return {input};
}

void writeOutputs(const JobConfig& cfg, const std::string& stem,
                  const mpis::ImageBuffer& left,
                  const mpis::ImageBuffer& right) {
  fs::create_directories(cfg.output);
  if (cfg.layout == "sbs") {
    mpis::ImageBuffer sbs(left.height, left.width * 2, 3);
    for (int y = 0; y < left.height; ++y) {
      std::copy(left.row(y), left.row(y) + static_cast<size_t>(left.width) * 3,
                sbs.row(y));
      std::copy(right.row(y),
                right.row(y) + static_cast<size_t>(right.width) * 3,
                sbs.row(y) + static_cast<size_t>(left.width) * 3);
    }
    mpis::writeImage((fs::path(cfg.output) / (stem + "_sbs.png")).string(),
                     sbs);
  } else {
    mpis::writeImage((fs::path(cfg.output) / (stem + "_left.png")).string(),
                     left);
    mpis::writeImage((fs::path(cfg.output) / (stem + "_right.png")).string(),
                     right);
  }
}

std::vector<uint8_t> readFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mpis::Error(mpis::ErrorKind::IoError, "cannot open " + path);
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

mpis::ImageBuffer convertFrame(const JobConfig& cfg,
                               const mpis::LmpinNetwork* net,
                               const std::string& framePath,
                               const std::string& depthPath) {
  mpis::ImageBuffer image = mpis::readImage(framePath);
  if (image.channels != 3)
    throw mpis::Error(mpis::ErrorKind::DimensionMismatch,
                      "expected a 3-channel input frame");
  mpis::clamp01(image);
  mpis::CameraRig rig = makeRig(cfg);

  if (cfg.mode == "dibr") {
    mpis::DepthMap depth = mpis::readDepth(depthPath);
    return mpis::dibrRender(image, depth, rig);
  }
  if (cfg.mode == "network") {
    const auto& nc = net->config();
    mpis::ImageBuffer netInput = resampleBilinear(image, nc.inputH, nc.inputW);
    mpis::ForwardResult fwd = net->forward(netInput);
    // The predicted MPI is the low-resolution stack of the accelerated
    // pipeline; the full-resolution frame supplies visible content.
    if (image.height % fwd.stack.height() == 0 &&
        image.width % fwd.stack.width() == 0 &&
        image.height / fwd.stack.height() == image.width / fwd.stack.width()) {
      int factor = image.height / fwd.stack.height();
      return mpis::renderLowresFused(image, fwd.stack, rig, factor);
    }
    // Resolutions not integer-related: resample the source to a multiple.
    int factor = std::max(1, image.height / nc.inputH);
    mpis::ImageBuffer resized =
        resampleBilinear(image, nc.inputH * factor, nc.inputW * factor);
    mpis::ImageBuffer rendered =
        mpis::renderLowresFused(resized, fwd.stack, rig, factor);
    return resampleBilinear(rendered, image.height, image.width);
  }
  // classical
  mpis::DepthMap depth = mpis::readDepth(depthPath);
  if (depth.height != image.height || depth.width != image.width)
    depth = resampleBilinear(depth, image.height, image.width);
  mpis::PlaneSpec spec = mpis::makePlaneSpec(
      cfg.nPlanes, static_cast<float>(cfg.dMin), static_cast<float>(cfg.dMax));
  mpis::BuildOptions opts;
  opts.assignMode = cfg.tent ? mpis::AssignMode::Tent : mpis::AssignMode::Hard;
  opts.inpaint = cfg.inpaint;
  mpis::PlaneStack stack = mpis::buildMpiClassical(image, depth, spec, opts);
  return mpis::renderView(stack, rig);
}

int cmdConvert(const JobConfig& cfg) {
  std::vector<std::string> frames = listFrames(cfg.input);
  std::vector<std::string> depths;
  if (cfg.mode != "network") {
    depths = listFrames(cfg.depth);
    if (depths.size() != frames.size())
      throw mpis::Error(mpis::ErrorKind::ListMismatch,
                        "frame and depth counts differ");
  }
  std::unique_ptr<mpis::LmpinNetwork> net;
  if (cfg.mode == "network") {
    mpis::NetworkConfig nc;
    nc.nPlanes = cfg.nPlanes;
    net = std::make_unique<mpis::LmpinNetwork>(
        nc, mpis::loadWeights(readFileBytes(cfg.weights), nc));
  }
  // Frames are independent; a bounded pool processes them with per-frame
  // single-threaded rendering when more than one frame is queued.
  int frameThreads =
      frames.size() > 1 ? std::min<int>(mpis::maxThreads(), frames.size()) : 1;
  std::vector<std::string> errors(frames.size());
  mpis::parallelFor(0, static_cast<int>(frames.size()),
                    [&](int lo, int hi) {
                      for (int i = lo; i < hi; ++i) {
                        try {
                          mpis::ImageBuffer right = convertFrame(
                              cfg, net.get(), frames[i],
                              depths.empty() ? "" : depths[i]);
                          mpis::clamp01(right);
                          mpis::ImageBuffer left = mpis::readImage(frames[i]);
                          mpis::clamp01(left);
                          std::string stem = fs::path(frames[i]).stem().string();
                          writeOutputs(cfg, stem, left, right);
                        } catch (const std::exception& e) {
                          errors[i] = e.what();
                        }
                      }
                    },
                    frameThreads);
  for (size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty()) {
      std::cerr << json{{"error", "ConvertFailed"},
                        {"frame", frames[i]},
                        {"message", errors[i]}}
                       .dump()
                << "\n";
      return 1;
    }
  return 0;
}

int cmdBuildMpi(const JobConfig& cfg, const std::string& archiveDir) {
  mpis::ImageBuffer image = mpis::readImage(cfg.input);
  mpis::clamp01(image);
  mpis::DepthMap depth = mpis::readDepth(cfg.depth);
  if (depth.height != image.height || depth.width != image.width)
    depth = resampleBilinear(depth, image.height, image.width);
  mpis::PlaneSpec spec = mpis::makePlaneSpec(
      cfg.nPlanes, static_cast<float>(cfg.dMin), static_cast<float>(cfg.dMax));
  mpis::BuildOptions opts;
  opts.assignMode = cfg.tent ? mpis::AssignMode::Tent : mpis::AssignMode::Hard;
  opts.inpaint = cfg.inpaint;
  mpis::PlaneStack stack = mpis::buildMpiClassical(image, depth, spec, opts);
  mpis::writeMpiArchive(archiveDir, stack);
  return 0;
}

int cmdRender(const std::string& archiveDir, const JobConfig& cfg,
              const std::string& outPath) {
  mpis::PlaneStack stack = mpis::readMpiArchive(archiveDir);
  mpis::CameraRig rig = makeRig(cfg);
  mpis::ImageBuffer view = mpis::renderView(stack, rig);
  mpis::clamp01(view);
  mpis::writeImage(outPath, view, 16);
  return 0;
}

double medianOf(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Synthetic layered scene used by the benchmark: band-limited background
// with a few depth-offset rectangles.
void makeBenchScene(int h, int w, mpis::ImageBuffer& image,
                    mpis::DepthMap& depth) {
  image = mpis::ImageBuffer(h, w, 3);
  depth = mpis::DepthMap(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      image.at(y, x, 0) = 0.5f + 0.4f * std::sin(0.013f * x + 0.007f * y);
      image.at(y, x, 1) = 0.5f + 0.4f * std::sin(0.011f * x - 0.009f * y);
      image.at(y, x, 2) = 0.5f + 0.4f * std::cos(0.008f * x + 0.012f * y);
      depth.at(y, x) = 0.1f;
    }
  std::mt19937 rng(7);
  for (int r = 0; r < 12; ++r) {
    int rw = w / 8 + static_cast<int>(rng() % (w / 6));
    int rh = h / 8 + static_cast<int>(rng() % (h / 6));
    int x0 = static_cast<int>(rng() % std::max(1, w - rw));
    int y0 = static_cast<int>(rng() % std::max(1, h - rh));
    float d = 0.2f + 0.05f * (rng() % 16);
    float shade = 0.2f + 0.05f * (rng() % 12);
    for (int y = y0; y < y0 + rh; ++y)
      for (int x = x0; x < x0 + rw; ++x) {
        if (depth.at(y, x) < d) {
          depth.at(y, x) = d;
          image.at(y, x, 0) = shade;
          image.at(y, x, 1) = 1.0f - shade;
          image.at(y, x, 2) = 0.5f * shade + 0.25f;
        }
      }
  }
  mpis::clamp01(image);
}

json benchReport(int h, int w, int nPlanes, int factor, int runs,
                 double maxDisparityPx) {
  using Clock = std::chrono::steady_clock;
  auto ms = [](Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };

  mpis::ImageBuffer image;
  mpis::DepthMap depth;
  makeBenchScene(h, w, image, depth);
  mpis::PlaneSpec spec = mpis::makePlaneSpec(nPlanes, 0.0f, 1.0f);
  mpis::CameraRig rig;
  rig.shiftScale = static_cast<float>(maxDisparityPx);

  mpis::DepthMap lowDepth = resampleBilinear(depth, h / factor, w / factor);
  mpis::ImageBuffer lowImage = resampleBilinear(image, h / factor, w / factor);

  std::vector<double> fullBuild, fullRender, lowBuild, lowRender;
  const int warmups = 3;
  for (int run = 0; run < runs + warmups; ++run) {
    auto t0 = Clock::now();
    mpis::PlaneStack full = mpis::buildMpiClassical(image, depth, spec);
    auto t1 = Clock::now();
    mpis::ImageBuffer fullView =
        mpis::renderLowresPipeline(image, full, rig, 1);
    auto t2 = Clock::now();
    mpis::PlaneStack low = mpis::buildMpiClassical(lowImage, lowDepth, spec);
    auto t3 = Clock::now();
    mpis::ImageBuffer lowView =
        mpis::renderLowresFused(image, low, rig, factor);
    auto t4 = Clock::now();
    if (run < warmups) continue;
    fullBuild.push_back(ms(t0, t1));
    fullRender.push_back(ms(t1, t2));
    lowBuild.push_back(ms(t2, t3));
    lowRender.push_back(ms(t3, t4));
  }

  // Stage split of the full-resolution render, measured once per run on
  // the already-built stack.
  std::vector<double> blendMs, warpCompositeMs;
  {
    mpis::PlaneStack full = mpis::buildMpiClassical(image, depth, spec);
    for (int run = 0; run < runs; ++run) {
      auto t0 = Clock::now();
      mpis::BlendWeights weights = mpis::blendWeights(full);
      std::vector<mpis::ImageBuffer> blended(nPlanes);
      for (int k = 0; k < nPlanes; ++k)
        blended[k] = mpis::blendColors(image, full.planes[k].color,
                                       weights.perPlane[k], h, w);
      auto t1 = Clock::now();
      mpis::ImageBuffer view = mpis::renderView(full, rig);
      auto t2 = Clock::now();
      blendMs.push_back(ms(t0, t1));
      warpCompositeMs.push_back(ms(t1, t2));
    }
  }

  double fullTotal = medianOf(fullBuild) + medianOf(fullRender);
  double lowTotal = medianOf(lowBuild) + medianOf(lowRender);
  json report;
  report["resolution"] = {{"height", h}, {"width", w}};
  report["n_planes"] = nPlanes;
  report["factor"] = factor;
  report["runs"] = runs;
  report["threads"] = mpis::maxThreads();
  report["full_resolution_ms"] = {{"build", medianOf(fullBuild)},
                                  {"blend", medianOf(blendMs)},
                                  {"warp_composite", medianOf(warpCompositeMs)},
                                  {"render", medianOf(fullRender)},
                                  {"total", fullTotal}};
  report["lowres_ms"] = {{"build", medianOf(lowBuild)},
                         {"render", medianOf(lowRender)},
                         {"total", lowTotal}};
  report["speedup"] = fullTotal / lowTotal;
  return report;
}

int cmdEval(const std::string& predDir, const std::string& gtDir,
            const std::string& outPath) {
  std::vector<std::string> pred = listFrames(predDir);
  std::vector<std::string> gt = listFrames(gtDir);
  if (pred.size() != gt.size() || pred.empty())
    throw mpis::Error(mpis::ErrorKind::ListMismatch,
                      "prediction and ground-truth lists differ");
  json frames = json::array();
  double sumPsnr = 0, sumSsim = 0, sumL1 = 0;
  for (size_t i = 0; i < pred.size(); ++i) {
    mpis::ImageBuffer a = mpis::readImage(pred[i]);
    mpis::ImageBuffer b = mpis::readImage(gt[i]);
    mpis::clamp01(a);
    mpis::clamp01(b);
    double p = mpis::psnr(a, b);
    double s = mpis::ssim(a, b);
    double l = mpis::l1(a, b);
    sumPsnr += p;
    sumSsim += s;
    sumL1 += l;
    frames.push_back({{"pred", pred[i]},
                      {"gt", gt[i]},
                      {"psnr", p},
                      {"ssim", s},
                      {"l1", l}});
  }
  json report;
  report["frames"] = frames;
  report["aggregate"] = {{"psnr", sumPsnr / pred.size()},
                         {"ssim", sumSsim / pred.size()},
                         {"l1", sumL1 / pred.size()},
                         {"count", pred.size()}};
  // reserved for a future perceptual metric
  report["aggregate"]["lpips"] = nullptr;
  if (outPath.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::ofstream out(outPath);
    out << report.dump(2) << "\n";
  }
  return 0;
}

int cmdInitWeights(const std::string& outPath, uint32_t seed, bool zero,
                   int nPlanes) {
  mpis::NetworkConfig nc;
  nc.nPlanes = nPlanes;
  mpis::NetworkWeights weights = mpis::initWeights(nc, seed, zero);
  std::vector<uint8_t> bytes = mpis::serializeWeights(weights);
  std::ofstream out(outPath, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw mpis::Error(mpis::ErrorKind::IoError, "cannot write " + outPath);
  return 0;
}

void addJobFlags(CLI::App* app, JobConfig& cfg, bool needsInput = true) {
  auto* in = app->add_option("-i,--input", cfg.input, "input frame or directory");
  if (needsInput) in->required();
  app->add_option("-d,--depth", cfg.depth, "depth map(s): 16-bit PNG or PFM");
  app->add_option("-w,--weights", cfg.weights, "LMPIN weight archive");
  app->add_option("-o,--output", cfg.output, "output directory");
  app->add_option("-m,--mode", cfg.mode, "classical|network|dibr")
      ->check(CLI::IsMember({"classical", "network", "dibr"}));
  app->add_option("--layout", cfg.layout, "pair|sbs")
      ->check(CLI::IsMember({"pair", "sbs"}));
  app->add_option("--direction", cfg.direction, "left-to-right|right-to-left")
      ->check(CLI::IsMember({"left-to-right", "right-to-left"}));
  app->add_option("-n,--planes", cfg.nPlanes, "number of MPI planes");
  app->add_option("--d-min", cfg.dMin, "minimum plane disparity");
  app->add_option("--d-max", cfg.dMax, "maximum plane disparity");
  app->add_option("--max-disparity-px", cfg.maxDisparityPx,
                  "pixel shift of the nearest plane");
  app->add_option("-f,--factor", cfg.factor, "low-resolution factor");
  app->add_flag("--inpaint,!--no-inpaint", cfg.inpaint,
                "extend background into occluded zones");
  app->add_flag("--tent", cfg.tent, "tent (soft) depth binning");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MPI-based planar-to-stereo conversion"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file");

  JobConfig cfg;

  auto* convert = app.add_subcommand("convert", "convert frames to stereo");
  addJobFlags(convert, cfg);

  JobConfig buildCfg;
  std::string archiveDir;
  auto* build = app.add_subcommand("build-mpi", "build an MPI archive");
  addJobFlags(build, buildCfg);
  build->add_option("--archive", archiveDir, "archive directory")->required();

  JobConfig renderCfg;
  std::string renderArchive, renderOut = "view.png";
  auto* render = app.add_subcommand("render", "render a view from an archive");
  render->add_option("--archive", renderArchive, "archive directory")
      ->required();
  render->add_option("-o,--output", renderOut, "output image");
  render->add_option("--max-disparity-px", renderCfg.maxDisparityPx,
                     "pixel shift of the nearest plane");
  render->add_option("--direction", renderCfg.direction,
                     "left-to-right|right-to-left");

  int benchH = 1080, benchW = 1920, benchPlanes = 16, benchFactor = 4,
      benchRuns = 20;
  double benchDisp = 16.0;
  std::string benchOut;
  auto* bench = app.add_subcommand("bench", "timing report");
  bench->add_option("--height", benchH);
  bench->add_option("--width", benchW);
  bench->add_option("-n,--planes", benchPlanes);
  bench->add_option("-f,--factor", benchFactor);
  bench->add_option("--runs", benchRuns);
  bench->add_option("--max-disparity-px", benchDisp);
  bench->add_option("-o,--output", benchOut, "report file (default stdout)");

  std::string evalPred, evalGt, evalOut;
  auto* eval = app.add_subcommand("eval", "metrics report over frame pairs");
  eval->add_option("--pred", evalPred, "predicted frames dir")->required();
  eval->add_option("--gt", evalGt, "ground-truth frames dir")->required();
  eval->add_option("-o,--output", evalOut, "report file (default stdout)");

  std::string initOut = "weights.lmpinw";
  uint32_t initSeed = 0;
  bool initZero = false;
  int initPlanes = 16;
  auto* init = app.add_subcommand("init-weights", "emit a weight archive");
  init->add_option("-o,--output", initOut, "archive path");
  init->add_option("--seed", initSeed, "RNG seed");
  init->add_flag("--zero", initZero, "all-zero weights");
  init->add_option("-n,--planes", initPlanes, "number of MPI planes");

  CLI11_PARSE(app, argc, argv);

  try {
    if (convert->parsed()) return cmdConvert(cfg);
    if (build->parsed()) return cmdBuildMpi(buildCfg, archiveDir);
    if (render->parsed()) return cmdRender(renderArchive, renderCfg, renderOut);
    if (bench->parsed()) {
      json report = benchReport(benchH, benchW, benchPlanes, benchFactor,
                                benchRuns, benchDisp);
      if (benchOut.empty()) {
        std::cout << report.dump(2) << "\n";
      } else {
        std::ofstream out(benchOut);
        out << report.dump(2) << "\n";
      }
      return 0;
    }
    if (eval->parsed()) return cmdEval(evalPred, evalGt, evalOut);
    if (init->parsed())
      return cmdInitWeights(initOut, initSeed, initZero, initPlanes);
  } catch (const mpis::Error& e) {
    std::cerr << json{{"error", errorKindName(e.kind())},
                      {"message", e.what()}}
                     .dump()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "Unexpected"}, {"message", e.what()}}.dump()
              << "\n";
    return 1;
  }
  return 0;
}
