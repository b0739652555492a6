#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vqcas/chem.hpp"

namespace vqcas {

namespace {

// Pulls NORB/NELEC/MS2 values out of the &FCI ... &END header block.
int header_int(const std::string& header, const std::string& key, long line, bool required,
               int fallback = 0) {
  const auto pos = header.find(key);
  if (pos == std::string::npos) {
    if (required) throw ParseError("fcidump: missing " + key, line);
    return fallback;
  }
  std::size_t i = pos + key.size();
  while (i < header.size() && (header[i] == ' ' || header[i] == '=')) ++i;
  std::size_t j = i;
  if (j < header.size() && (header[j] == '+' || header[j] == '-')) ++j;
  while (j < header.size() && std::isdigit(static_cast<unsigned char>(header[j]))) ++j;
  if (i == j) throw ParseError("fcidump: malformed " + key, line);
  return std::stoi(header.substr(i, j - i));
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15e", v);
  return buf;
}

}  // namespace

FcidumpData parse_fcidump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("fcidump: cannot open " + path.string());

  std::string line;
  std::string header;
  long line_no = 0;
  bool header_done = false;
  while (std::getline(in, line)) {
    ++line_no;
    header += " " + line;
    if (line.find("&END") != std::string::npos || line.find("/") != std::string::npos) {
      header_done = true;
      break;
    }
  }
  if (!header_done) throw ParseError("fcidump: header never terminated", line_no);

  FcidumpData data;
  const int norb = header_int(header, "NORB", line_no, true);
  data.n_electrons = header_int(header, "NELEC", line_no, true);
  data.ms2 = header_int(header, "MS2", line_no, false, 0);
  if (norb < 1) throw ParseError("fcidump: NORB must be positive", line_no);
  data.integrals = ActiveSpaceIntegrals(norb, 0.0);

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream fields(line);
    double value;
    int p, q, r, s;
    if (!(fields >> value)) throw ParseError("fcidump: non-numeric value", line_no);
    if (!(fields >> p >> q >> r >> s)) throw ParseError("fcidump: short integral line", line_no);
    if (p < 0 || q < 0 || r < 0 || s < 0 || p > norb || q > norb || r > norb || s > norb)
      throw ParseError("fcidump: orbital index out of range", line_no);

    if (p == 0 && q == 0 && r == 0 && s == 0) {
      data.integrals.set_e_core(value);
    } else if (r == 0 && s == 0) {
      if (p == 0 || q == 0) throw ParseError("fcidump: bad h1 indices", line_no);
      data.integrals.set_one_body(p - 1, q - 1, value);
    } else {
      if (p == 0 || q == 0 || r == 0 || s == 0)
        throw ParseError("fcidump: bad h2 indices", line_no);
      data.integrals.set_two_body(p - 1, q - 1, r - 1, s - 1, value);
    }
  }
  return data;
}

void write_fcidump(const FcidumpData& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("fcidump: cannot write " + path.string());
  const int n = data.integrals.n_orbitals();
  out << "&FCI NORB=" << n << ",NELEC=" << data.n_electrons << ",MS2=" << data.ms2 << ",\n";
  out << " ORBSYM=";
  for (int i = 0; i < n; ++i) out << "1,";
  out << "\n ISYM=1,\n&END\n";

  // Unique representatives of the 8-fold h2 symmetry.
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q)
      for (int r = 0; r <= p; ++r)
        for (int s = 0; s <= (r == p ? q : r); ++s) {
          const double v = data.integrals.two_body(p, q, r, s);
          if (std::abs(v) < 1e-14) continue;
          out << fmt(v) << " " << p + 1 << " " << q + 1 << " " << r + 1 << " " << s + 1 << "\n";
        }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q) {
      const double v = data.integrals.one_body(p, q);
      if (std::abs(v) < 1e-14) continue;
      out << fmt(v) << " " << p + 1 << " " << q + 1 << " 0 0\n";
    }
  out << fmt(data.integrals.e_core()) << " 0 0 0 0\n";
}

void write_rdms(const RDMPair& rdms, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("rdm export: cannot write " + path.string());
  const int n = rdms.n_orbitals;
  out << "VQCAS_RDM 1\n";
  out << "norb " << n << "\n";
  out << "weights " << rdms.weights.size();
  for (double w : rdms.weights) out << " " << fmt(w);
  out << "\n";
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      const double v = rdms.one_rdm(p, q);
      if (std::abs(v) < 1e-14) continue;
      out << "1rdm " << p << " " << q << " " << fmt(v) << "\n";
    }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double v = rdms.two(p, q, r, s);
          if (std::abs(v) < 1e-14) continue;
          out << "2rdm " << p << " " << q << " " << r << " " << s << " " << fmt(v) << "\n";
        }
}

RDMPair read_rdms(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("rdm import: cannot open " + path.string());
  std::string tag;
  int version;
  if (!(in >> tag >> version) || tag != "VQCAS_RDM" || version != 1)
    throw ParseError("rdm import: bad magic");
  int n = 0;
  if (!(in >> tag >> n) || tag != "norb" || n < 1) throw ParseError("rdm import: bad norb");
  RDMPair rdms = RDMPair::zero(n);
  std::size_t n_weights = 0;
  if (!(in >> tag >> n_weights) || tag != "weights") throw ParseError("rdm import: bad weights");
  rdms.weights.resize(n_weights);
  for (double& w : rdms.weights)
    if (!(in >> w)) throw ParseError("rdm import: truncated weights");

  while (in >> tag) {
    if (tag == "1rdm") {
      int p, q;
      double v;
      if (!(in >> p >> q >> v)) throw ParseError("rdm import: bad 1rdm line");
      rdms.one_rdm(p, q) = v;
    } else if (tag == "2rdm") {
      int p, q, r, s;
      double v;
      if (!(in >> p >> q >> r >> s >> v)) throw ParseError("rdm import: bad 2rdm line");
      rdms.two(p, q, r, s) = v;
    } else {
      throw ParseError("rdm import: unknown record '" + tag + "'");
    }
  }
  return rdms;
}

}  // namespace vqcas
