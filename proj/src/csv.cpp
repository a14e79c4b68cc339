#include "homctl/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace homctl {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // The C locale always prints '.'; harden against a caller-changed locale.
  for (char* c = buf; *c; ++c) {
    if (*c == ',') *c = '.';
  }
  return buf;
}

}  // namespace

void write_trace_csv(const Trace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_trace_csv: cannot open " + path);
  }
  const auto n = trace.states.empty() ? 0 : trace.states.front().size();
  const auto m = trace.inputs.empty() ? 0 : trace.inputs.front().size();
  const auto p = trace.barriers.empty() ? 0 : trace.barriers.front().size();
  out << "t";
  for (Eigen::Index k = 0; k < n; ++k) out << ",x" << (k + 1);
  for (Eigen::Index k = 0; k < m; ++k) out << ",u" << (k + 1);
  for (Eigen::Index k = 0; k < p; ++k) out << ",phi" << (k + 1);
  out << ",homnorm\n";
  for (std::size_t row = 0; row < trace.times.size(); ++row) {
    out << format_double(trace.times[row]);
    for (Eigen::Index k = 0; k < n; ++k) out << "," << format_double(trace.states[row](k));
    for (Eigen::Index k = 0; k < m; ++k) out << "," << format_double(trace.inputs[row](k));
    for (Eigen::Index k = 0; k < p; ++k) out << "," << format_double(trace.barriers[row](k));
    out << "," << format_double(trace.hom_norms[row]) << "\n";
  }
}

void write_plot_script(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_plot_script: cannot open " + path);
  }
  out << R"(#!/usr/bin/env python3
"""Plots a trace CSV produced by `homctl simulate`."""
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main():
    if len(sys.argv) < 2:
        sys.exit("usage: plot_trace.py TRACE.csv [OUT.png]")
    path = sys.argv[1]
    out = sys.argv[2] if len(sys.argv) > 2 else path.rsplit(".", 1)[0] + ".png"
    with open(path) as f:
        header = f.readline().strip().split(",")
        rows = [[float(v) for v in line.split(",")] for line in f if line.strip()]
    cols = {name: [r[i] for r in rows] for i, name in enumerate(header)}
    t = cols["t"]
    groups = [
        ("states", [c for c in header if c.startswith("x")]),
        ("inputs", [c for c in header if c.startswith("u")]),
        ("barriers", [c for c in header if c.startswith("phi")]),
        ("homogeneous norm", ["homnorm"]),
    ]
    groups = [(title, names) for title, names in groups if names]
    fig, axes = plt.subplots(len(groups), 1, figsize=(8, 2.6 * len(groups)), sharex=True)
    if len(groups) == 1:
        axes = [axes]
    for ax, (title, names) in zip(axes, groups):
        for name in names:
            ax.plot(t, cols[name], label=name)
        ax.set_ylabel(title)
        ax.grid(True, alpha=0.3)
        ax.legend(loc="best", fontsize=8)
    axes[-1].set_xlabel("t [s]")
    fig.tight_layout()
    fig.savefig(out, dpi=130)
    print(out)


if __name__ == "__main__":
    main()
)";
}

}  // namespace homctl
