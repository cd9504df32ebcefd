#include "passlab/output.hpp"

#include <cstdio>
#include <fstream>

#include "passlab/errors.hpp"

namespace passlab {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<CsvColumn>& columns, std::size_t stride) {
  if (columns.empty()) throw InvalidArgument("CSV needs at least one column");
  if (stride == 0) throw InvalidArgument("CSV stride must be at least 1");
  const std::size_t rows = columns.front().values.size();
  for (const auto& c : columns)
    if (c.values.size() != rows) throw InvalidArgument("CSV columns differ in length");

  std::string text;
  for (std::size_t j = 0; j < columns.size(); ++j) text += (j ? "," : "") + columns[j].header;
  text += '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    if (i % stride != 0 && i + 1 != rows) continue;
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j) text += ',';
      text += format_number(columns[j].values[i]);
    }
    text += '\n';
  }
  write_text(path, text);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::ios_base::failure("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::ios_base::failure("write failed for '" + path.string() + "'");
}

std::string plot_script(const std::vector<std::string>& csv_files) {
  std::string s =
      "import csv\n"
      "import os\n"
      "import matplotlib\n"
      "matplotlib.use(\"Agg\")\n"
      "import matplotlib.pyplot as plt\n"
      "\n"
      "here = os.path.dirname(os.path.abspath(__file__))\n"
      "files = [\n";
  for (const auto& f : csv_files) s += "    \"" + f + "\",\n";
  s +=
      "]\n"
      "\n"
      "for name in files:\n"
      "    with open(os.path.join(here, name)) as fh:\n"
      "        rows = list(csv.reader(fh))\n"
      "    header, data = rows[0], [[float(v) for v in r] for r in rows[1:]]\n"
      "    fig, ax = plt.subplots()\n"
      "    for j in range(1, len(header)):\n"
      "        ax.plot([r[0] for r in data], [r[j] for r in data], label=header[j])\n"
      "    ax.set_xlabel(header[0])\n"
      "    ax.legend()\n"
      "    fig.savefig(os.path.join(here, os.path.splitext(name)[0] + \".png\"), dpi=120)\n"
      "    plt.close(fig)\n";
  return s;
}

}  // namespace passlab
