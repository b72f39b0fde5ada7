#include "crlab/io/serialize.hpp"

#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace crlab {

std::string chart_kind_name(ChartKind k) {
  switch (k) {
    case ChartKind::periodic3: return "periodic3";
    case ChartKind::invariant2: return "invariant2";
    case ChartKind::nil3: return "nil3";
    case ChartKind::spacetime: return "spacetime";
    case ChartKind::pointset: return "pointset";
  }
  return "?";
}

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian; buffer swap not implemented");

void save_field(const Field& f, const std::string& path) {
  if (!f.chart->is_grid()) throw Error("pointset fields do not serialize to the grid layout");
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw Error("cannot open " + path);
  for (const cplx& z : f.v) {
    double re = z.real(), im = z.imag();
    bin.write(reinterpret_cast<const char*>(&re), 8);
    bin.write(reinterpret_cast<const char*>(&im), 8);
  }
  bin.close();

  nlohmann::json side;
  side["schema"] = 1;
  side["kind"] = chart_kind_name(f.chart->kind);
  side["weight"] = f.weight;
  for (auto& ax : f.chart->axes) {
    side["dims"].push_back(ax.n);
    side["periods"].push_back(ax.length);
    side["origins"].push_back(ax.origin);
    side["axis_kinds"].push_back(ax.kind == AxisKind::fourier ? "fourier" : "time_fd");
  }
  side["fiber"] = f.chart->fiber;
  std::ofstream js(path + ".json");
  js << side.dump(2) << "\n";
}

void save_structure(const Structure& st, const std::string& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["schema"] = 1;
  manifest["kind"] = chart_kind_name(st.chart->kind);
  manifest["nforms"] = st.chart->nforms;
  auto put = [&](const Field& f, const std::string& name) {
    save_field(f, dir + "/" + name + ".bin");
    manifest["fields"].push_back(name + ".bin");
  };
  for (int a = 0; a < st.chart->nforms; ++a) {
    put(st.theta.c[a], "theta_" + std::to_string(a));
    put(st.theta1.c[a], "theta1_" + std::to_string(a));
  }
  put(st.A11, "A11");
  put(st.W, "W");
  manifest["residuals"]["normalization"] = st.res.normalization;
  manifest["residuals"]["structure_eq"] = st.res.structure_eq;
  manifest["residuals"]["curvature_eq"] = st.res.curvature_eq;
  manifest["residuals"]["omega_reality"] = st.res.omega_reality;
  manifest["residuals"]["imW"] = st.res.imW;
  manifest["vol_sign"] = st.vol_sign;
  std::ofstream js(dir + "/manifest.json");
  js << manifest.dump(2) << "\n";
}

Field load_field(const std::string& path) {
  std::ifstream js(path + ".json");
  if (!js) throw Error("missing sidecar for " + path);
  nlohmann::json side;
  js >> side;

  std::string kind = side["kind"];
  std::vector<int> dims = side["dims"].get<std::vector<int>>();
  std::vector<double> periods = side["periods"].get<std::vector<double>>();

  ChartPtr ch;
  if (kind == "periodic3") {
    ch = make_periodic3({dims[0], dims[1], dims[2]}, {periods[0], periods[1], periods[2]});
  } else if (kind == "invariant2") {
    ch = make_invariant2(dims[0], dims[1], {periods[0], periods[1]}, side.value("fiber", 0.0));
  } else if (kind == "nil3") {
    ch = make_nil3({dims[0], dims[1], dims[2]}, {periods[0], periods[1], periods[2]});
  } else {
    throw Error("cannot reload chart kind " + kind);
  }

  Field f(ch, side.value("weight", 0));
  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw Error("cannot open " + path);
  for (cplx& z : f.v) {
    double re, im;
    bin.read(reinterpret_cast<char*>(&re), 8);
    bin.read(reinterpret_cast<char*>(&im), 8);
    z = cplx(re, im);
  }
  if (!bin) throw Error("truncated field file " + path);
  return f;
}

} // namespace crlab
