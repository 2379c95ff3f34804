#include "lrlab/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "lrlab/error.hpp"

namespace lrlab::io {

static_assert(std::endian::native == std::endian::little, "field files assume a little-endian host");

namespace {

constexpr int kFormatVersion = 1;

nlohmann::json header(const SpacetimeGrid& g, const char* dtype, std::size_t count) {
  nlohmann::json lo = nlohmann::json::array(), hi = nlohmann::json::array(), nx = nlohmann::json::array();
  for (int k = 0; k < g.n_spatial(); ++k) {
    lo.push_back(g.box_lo(k));
    hi.push_back(g.box_hi(k));
    nx.push_back(g.n_x(k));
  }
  return {{"version", kFormatVersion},
          {"n_spatial", g.n_spatial()},
          {"T", g.T()},
          {"box", {{"lo", lo}, {"hi", hi}}},
          {"n_t", g.n_t()},
          {"n_x", nx},
          {"dtype", dtype},
          {"component_count", count}};
}

SpacetimeGrid grid_from(const nlohmann::json& h) {
  const int n = h.at("n_spatial").get<int>();
  std::array<double, 3> lo{}, hi{};
  std::array<int, 3> nx{4, 4, 4};
  for (int k = 0; k < n; ++k) {
    lo[k] = h.at("box").at("lo").at(k).get<double>();
    hi[k] = h.at("box").at("hi").at(k).get<double>();
    nx[k] = h.at("n_x").at(k).get<int>();
  }
  return SpacetimeGrid(n, h.at("T").get<double>(), lo, hi, h.at("n_t").get<int>(), nx);
}

template <class T>
void write_impl(const std::filesystem::path& stem, const std::vector<BasicScalarField<T>>& comps,
                const char* dtype) {
  require(!comps.empty(), ErrorCode::InvalidArgument, "write_fields: nothing to write");
  const auto& g = comps.front().grid();
  for (const auto& c : comps) require_same_grid(g, c.grid(), "write_fields");
  auto bin = stem;
  bin += ".bin";
  auto js = stem;
  js += ".json";
  std::ofstream out(bin, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot open " + bin.string());
  for (const auto& c : comps)
    out.write(reinterpret_cast<const char*>(c.vec().data()),
              static_cast<std::streamsize>(c.size() * sizeof(T)));
  if (!out) fail(ErrorCode::IoError, "write failed: " + bin.string());
  std::ofstream hj(js);
  if (!hj) fail(ErrorCode::IoError, "cannot open " + js.string());
  hj << header(g, dtype, comps.size()).dump(2) << "\n";
}

template <class T>
std::vector<BasicScalarField<T>> read_impl(const std::filesystem::path& stem, const char* dtype) {
  auto bin = stem;
  bin += ".bin";
  auto js = stem;
  js += ".json";
  std::ifstream hj(js);
  if (!hj) fail(ErrorCode::IoError, "cannot open " + js.string());
  nlohmann::json h;
  try {
    hj >> h;
  } catch (const std::exception& e) {
    fail(ErrorCode::IoError, std::string("bad header ") + js.string() + ": " + e.what());
  }
  if (h.value("dtype", "") != dtype)
    fail(ErrorCode::IoError, "dtype mismatch in " + js.string());
  const SpacetimeGrid g = grid_from(h);
  const auto count = h.at("component_count").get<std::size_t>();
  std::ifstream in(bin, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + bin.string());
  std::vector<BasicScalarField<T>> out;
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<T> s(g.size());
    in.read(reinterpret_cast<char*>(s.data()), static_cast<std::streamsize>(s.size() * sizeof(T)));
    if (!in) fail(ErrorCode::IoError, "truncated field file " + bin.string());
    out.emplace_back(g, std::move(s));
  }
  return out;
}

}  // namespace

void write_fields(const std::filesystem::path& stem, const std::vector<ScalarField>& comps) {
  write_impl(stem, comps, "f64");
}
void write_fields(const std::filesystem::path& stem, const std::vector<ComplexField>& comps) {
  write_impl(stem, comps, "c128");
}
std::vector<ScalarField> read_real_fields(const std::filesystem::path& stem) {
  return read_impl<double>(stem, "f64");
}
std::vector<ComplexField> read_complex_fields(const std::filesystem::path& stem) {
  return read_impl<cplx>(stem, "c128");
}

}  // namespace lrlab::io
