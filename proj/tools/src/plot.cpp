#include "fpme/cli/plot.hpp"

#include "fpme/error.hpp"
#include "fpme/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

namespace fpme::cli {

namespace {

enum class Kind { Ledger, Profile, Other };

Kind classify(const std::filesystem::path& file) {
    std::ifstream in(file);
    std::string header;
    std::getline(in, header);
    if (header.rfind("t,energy,cum_dissipation,dist_plus,dist_minus", 0) == 0) return Kind::Ledger;
    if (header.rfind("tau,energy,bound", 0) == 0) return Kind::Profile;
    return Kind::Other;
}

std::string quoted(const std::filesystem::path& p) {
    std::string s = p.string();
    std::string out = "\"";
    for (char c : s) {
        if (c == '\\' || c == '"') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

void emit_plot_script(const std::vector<std::filesystem::path>& csv_files, const std::filesystem::path& script) {
    if (csv_files.empty()) throw Error(ErrorKind::MissingFile, "no CSV files to plot");
    std::vector<std::filesystem::path> ledgers;
    std::vector<std::filesystem::path> profiles;
    for (const auto& f : csv_files) {
        if (!std::filesystem::is_regular_file(f)) throw Error(ErrorKind::MissingFile, f.string());
        switch (classify(f)) {
            case Kind::Ledger: ledgers.push_back(f); break;
            case Kind::Profile: profiles.push_back(f); break;
            case Kind::Other: break;
        }
    }
    if (ledgers.empty() && profiles.empty()) throw Error(ErrorKind::Io, "no ledger or profile CSV among the inputs");

    const auto base = script.has_parent_path() ? script.parent_path() : std::filesystem::path(".");
    std::ostringstream py;
    py << "import os\n"
          "import pandas as pd\n"
          "import matplotlib.pyplot as plt\n\n"
          "HERE = os.path.dirname(os.path.abspath(__file__))\n\n";
    py << "ledgers = [";
    for (const auto& f : ledgers) py << quoted(std::filesystem::proximate(f, base)) << ", ";
    py << "]\nprofiles = [";
    for (const auto& f : profiles) py << quoted(std::filesystem::proximate(f, base)) << ", ";
    py << "]\n\n";
    py << "for name in ledgers:\n"
          "    df = pd.read_csv(os.path.join(HERE, name))\n"
          "    fig, (ax_e, ax_d) = plt.subplots(1, 2, figsize=(10, 4))\n"
          "    ax_e.plot(df[\"t\"], df[\"energy\"])\n"
          "    ax_e.set_xlabel(\"t\")\n"
          "    ax_e.set_ylabel(\"energy\")\n"
          "    ax_d.semilogy(df[\"t\"], df[\"dist_plus\"], label=\"dist_plus\")\n"
          "    ax_d.semilogy(df[\"t\"], df[\"dist_minus\"], label=\"dist_minus\")\n"
          "    ax_d.set_xlabel(\"t\")\n"
          "    ax_d.legend()\n"
          "    fig.tight_layout()\n"
          "    fig.savefig(os.path.join(HERE, os.path.splitext(name)[0] + \".png\"))\n\n";
    py << "for name in profiles:\n"
          "    df = pd.read_csv(os.path.join(HERE, name))\n"
          "    fig, ax = plt.subplots(figsize=(5, 4))\n"
          "    ax.plot(df[\"tau\"], df[\"energy\"], label=\"energy\")\n"
          "    if df[\"bound\"].notna().any():\n"
          "        ax.plot(df[\"tau\"], df[\"bound\"], \"--\", label=\"bound\")\n"
          "    ax.set_xlabel(\"tau\")\n"
          "    ax.legend()\n"
          "    fig.tight_layout()\n"
          "    fig.savefig(os.path.join(HERE, os.path.splitext(name)[0] + \".png\"))\n";
    write_text_atomic(script, py.str());
}

std::filesystem::path emit_plot_script(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw Error(ErrorKind::MissingFile, dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv" && classify(entry.path()) != Kind::Other) {
            files.push_back(entry.path());
        }
    }
    if (files.empty()) throw Error(ErrorKind::MissingFile, "no ledger or profile CSV in " + dir.string());
    std::sort(files.begin(), files.end());
    const auto script = dir / "plot.py";
    emit_plot_script(files, script);
    return script;
}

}  // namespace fpme::cli
