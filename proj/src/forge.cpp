#include "tleval/forge.hpp"

#include "tleval/search.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <random>

namespace tleval {

namespace {

const std::vector<std::string> columns = {"datetime", "timestamp_desc", "source", "source_long",
                                          "message",  "parser",         "display_name", "tag"};

struct Row {
    UtcInstant at{};
    std::string timestamp_desc;
    std::string source;
    std::string source_long;
    std::string message;
    std::string parser;
    std::string display_name;
    std::string tag;
    enum class Kind { Planted, Bait, Noise } kind = Kind::Noise;
    std::size_t planted_index = 0;
};

// Portable across standard libraries, unlike the std distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }
    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[below(items.size())];
    }

private:
    std::mt19937_64 engine_;
};

std::string hex32(std::uint64_t v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08llX", static_cast<unsigned long long>(v & 0xffffffffULL));
    return buf;
}

std::string query_encode(std::string_view text) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (const char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(ch);
        } else if (c == ' ') {
            out.push_back('+');
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xF]);
        }
    }
    return out;
}

std::string host_of(const std::string& url) {
    const auto start = url.find("://");
    if (start == std::string::npos) {
        return {};
    }
    const auto from = start + 3;
    const auto end = url.find_first_of("/ :?#", from);
    return url.substr(from, end == std::string::npos ? std::string::npos : end - from);
}

std::string param(const PlantedEvent& p, const std::string& name, const std::string& fallback) {
    const auto it = p.params.find(name);
    return it == p.params.end() ? fallback : it->second;
}

constexpr const char* chrome_history_path =
    "OS:C:\\Users\\User\\AppData\\Local\\Microsoft\\Edge\\User Data\\Default\\History";
constexpr const char* firefox_history_path =
    "OS:C:\\Users\\User\\AppData\\Roaming\\Mozilla\\Firefox\\Profiles\\q6yqz1vd.default-release\\places.sqlite";

// Builds the planted row together with the attributes the summarizer must recover.
Row planted_row(const PlantedEvent& p, Rng& rng, KeyValues& keys, std::string& description,
                std::string& type_name, Category& category) {
    Row row;
    row.at = p.at;
    row.kind = Row::Kind::Planted;
    const EventTypeSpec* spec = find_analyzer(p.type);
    if (spec == nullptr) {
        throw SpecError("unknown event type '" + p.type + "'");
    }
    type_name = spec->name;
    category = spec->category;

    if (p.type == "google-search" || p.type == "bing-search") {
        const bool google = p.type == "google-search";
        const auto query =
            param(p, "query", google ? "sql injection" : "Mozilla Firefox download");
        const auto url = google ? "https://www.google.com/search?q=" + query_encode(query) +
                                      "&source=hp&ei=Zm2LZc3nJ8Wp5NoPx7aVgAk"
                                : "https://www.bing.com/search?q=" + query_encode(query) +
                                      "&form=QBLH&sp=-1&ghc=1&lq=0";
        row.timestamp_desc = "Last Visited Time";
        row.source = "WEBHIST";
        if (google) {
            row.source_long = "Firefox History";
            row.parser = "sqlite/firefox_history";
            row.display_name = firefox_history_path;
            row.message = url + " (" + query +
                          " - Google Search) [count: 1] Host: www.google.com (URL not typed "
                          "directly) Transition: LINK";
        } else {
            row.source_long = "Chrome History";
            row.parser = "sqlite/chrome_27_history";
            row.display_name = chrome_history_path;
            row.message = url + " (" + query +
                          " - Search) [count: 1] Visit from: https://www.bing.com/ Type: [TYPED - "
                          "User typed the URL in the URL bar] (URL typed directly - 1 typed count)";
        }
        keys = {{"Search query", query}, {"URL", url}};
        description = std::string(google ? "Google" : "Bing") + " search for '" + query + "'";
    } else if (p.type == "web-visit") {
        const auto url = param(p, "url", "https://www.w3schools.com/sql/sql_injection.asp");
        const auto title = param(p, "title", "SQL Injection");
        row.timestamp_desc = "Last Visited Time";
        row.source = "WEBHIST";
        row.source_long = "Firefox History";
        row.parser = "sqlite/firefox_history";
        row.display_name = firefox_history_path;
        const auto host = host_of(url);
        row.message = url + " (" + title + ") [count: 1] Host: " + host +
                      " (URL not typed directly) Transition: LINK";
        keys = {{"Domain", host}, {"URL", url}};
        description = "Web visit to '" + host + "'";
    } else if (p.type == "last-shutdown") {
        const std::string key = "HKEY_LOCAL_MACHINE\\System\\ControlSet001\\Control\\Windows";
        row.timestamp_desc = "Content Modification Time";
        row.source = "REG";
        row.source_long = "Registry Key Shutdown Entry";
        row.parser = "winreg/windows_shutdown";
        row.display_name = "NTFS:\\Windows\\System32\\config\\SYSTEM";
        row.message = "[" + key + "] Description: ShutdownTime";
        keys = {{"Registry key", key}};
        description = "Last shutdown of the system";
    } else if (p.type == "process-creation") {
        const auto exe = param(p, "executable", "msedge.exe");
        const auto args = param(p, "arguments", "--no-startup-window --win-session-start");
        row.timestamp_desc = "Creation Time";
        row.source = "EVT";
        row.source_long = "WinEVTX";
        row.parser = "winevtx";
        row.display_name =
            "NTFS:\\Windows\\System32\\winevt\\Logs\\Microsoft-Windows-Shell-Core%4Operational.evtx";
        row.message = "[9707 / 0x25eb] Provider identifier: {30336ed4-e327-447c-9de0-51b652c86108} "
                      "Source Name: Microsoft-Windows-Shell-Core Strings: ['" +
                      exe + "\" " + args +
                      "'] Computer Name: WinDev2311Eval Record Number: " +
                      std::to_string(2000 + rng.below(900)) + " Event Level: 4";
        keys = {{"Windows Event ID", "9707"},
                {"Windows Event ID (hex)", "0x25eb"},
                {"Executable name", basename_of(exe)}};
        description = "Process creation of '" + basename_of(exe) + "'";
    } else if (p.type == "program-opened") {
        const auto exe = param(p, "executable", "REGEDIT.EXE");
        const auto runs = param(p, "run_count", "3");
        const auto hash = hex32(0x246AC210ULL + rng.below(1u << 20));
        row.timestamp_desc = "Last Time Executed";
        row.source = "LOG";
        row.source_long = "WinPrefetch";
        row.parser = "prefetch";
        row.display_name = "NTFS:\\Windows\\prefetch\\" + exe + "-" + hash + ".pf";
        row.message = "Prefetch [" + exe + "] was executed - run count " + runs +
                      " path hints: \\WINDOWS\\" + exe + " hash: 0x" + hash +
                      " volume: 1 [serial number: 0x5CE1DF5A  device path: "
                      "\\VOLUME{01da182ce1985a64-5ce1df5a}]";
        keys = {{"Executable name", exe}, {"Run count", runs}};
        description = "Program opened: '" + exe + "'";
    } else if (p.type == "file-download") {
        const auto path = param(p, "path", "C:\\Users\\User\\Downloads\\Firefox Installer.exe");
        const auto url = param(p, "url",
                               "https://download-installer.cdn.mozilla.net/pub/firefox/releases/"
                               "121.0/win64/en-US/Firefox%20Installer.exe");
        const auto size = param(p, "size", "356616");
        row.timestamp_desc = "File Downloaded";
        row.source = "WEBHIST";
        row.source_long = "Chrome History";
        row.parser = "sqlite/chrome_27_history";
        row.display_name = chrome_history_path;
        row.message = url + " (" + path + "). Received: " + size + " bytes out of: " + size +
                      " bytes.";
        keys = {{"File name", basename_of(path)},
                {"Full path", path},
                {"URL", url},
                {"Received bytes", size},
                {"Total bytes", size}};
        description = "File download of '" + basename_of(path) + "'";
    } else if (p.type == "recent-file-access") {
        const auto path =
            param(p, "path", "C:\\Users\\User\\Documents\\sql-injection-notes.txt");
        const auto name = basename_of(path);
        const auto stem = name.substr(0, name.find_last_of('.'));
        row.timestamp_desc = "Last Access Time";
        row.source = "LNK";
        row.source_long = "Windows Shortcut";
        row.parser = "lnk";
        row.display_name =
            "NTFS:\\Users\\User\\AppData\\Roaming\\Microsoft\\Windows\\Recent\\" + stem + ".lnk";
        row.message = "[Empty description] File size: 2048 File attribute flags: 0x00000020 "
                      "Drive type: 3 Drive serial number: 0x5CE1DF5A Volume label: Local path: " +
                      path + " Link target: <My Computer> " + path;
        keys = {{"File name", name}, {"File path", path}};
        description = "Recent file access of '" + name + "'";
    }
    return row;
}

const std::vector<std::string> noise_descs = {"Metadata Modification Time", "Creation Time",
                                              "Last Access Time", "Content Modification Time"};

Row noise_row(Rng& rng) {
    static const std::vector<std::string> dlls = {"kernel32", "ntdll",  "user32",  "advapi32",
                                                  "shell32",  "ole32",  "combase", "msvcrt",
                                                  "ws2_32",   "crypt32"};
    static const std::vector<std::string> explorer_keys = {"Advanced", "Ribbon", "Wallpapers",
                                                           "StartPage", "CabinetState"};
    static const std::vector<std::string> services = {
        "Windows Update", "Background Intelligent Transfer Service", "Print Spooler",
        "Windows Modules Installer"};
    Row row;
    row.kind = Row::Kind::Noise;
    switch (rng.below(4)) {
    case 0: {
        const auto path = "NTFS:\\Windows\\System32\\" + rng.pick(dlls) + ".dll";
        row.timestamp_desc = rng.pick(noise_descs);
        row.source = "FILE";
        row.source_long = "File stat";
        row.parser = "filestat";
        row.display_name = path;
        row.message = path + " Type: file";
        break;
    }
    case 1: {
        const auto path = "NTFS:\\Users\\User\\AppData\\Local\\Temp\\" + hex32(rng.below(1ULL << 32)) +
                          ".tmp";
        row.timestamp_desc = rng.pick(noise_descs);
        row.source = "FILE";
        row.source_long = "NTFS MFT";
        row.parser = "mft";
        row.display_name = "NTFS:\\$MFT";
        row.message = path + " File reference: " + std::to_string(10000 + rng.below(90000)) + "-" +
                      std::to_string(1 + rng.below(9)) +
                      " Attribute name: $STANDARD_INFORMATION";
        break;
    }
    case 2: {
        row.timestamp_desc = "Content Modification Time";
        row.source = "REG";
        row.source_long = "Registry Key";
        row.parser = "winreg/winreg_default";
        row.display_name = "NTFS:\\Users\\User\\NTUSER.DAT";
        row.message = "[HKEY_CURRENT_USER\\Software\\Microsoft\\Windows\\CurrentVersion\\Explorer\\" +
                      rng.pick(explorer_keys) + "] Value: REG_DWORD " +
                      std::to_string(rng.below(2));
        break;
    }
    default: {
        row.timestamp_desc = "Creation Time";
        row.source = "EVT";
        row.source_long = "WinEVTX";
        row.parser = "winevtx";
        row.display_name = "NTFS:\\Windows\\System32\\winevt\\Logs\\System.evtx";
        row.message = "[7036 / 0x1b7c] Provider identifier: {555908d1-a6d7-4695-8e1e-26931d2012f4} "
                      "Source Name: Service Control Manager Strings: ['" +
                      rng.pick(services) + "', '" +
                      (rng.below(2) ? std::string("running") : std::string("stopped")) +
                      "'] Computer Name: WinDev2311Eval Record Number: " +
                      std::to_string(1000 + rng.below(9000)) + " Event Level: 4";
        break;
    }
    }
    return row;
}

std::string security_event(const std::string& id_hex, const std::string& strings,
                           std::uint64_t record) {
    return id_hex +
           " Provider identifier: {54849625-5478-4994-a5ba-3e3b0328c30d} Source Name: "
           "Microsoft-Windows-Security-Auditing Strings: [" +
           strings + "] Computer Name: WinDev2311Eval Record Number: " + std::to_string(record) +
           " Event Level: 0";
}

Row bait_row(Rng& rng, std::size_t k) {
    static const std::vector<std::string> apps = {"Firefox-308046B0AF4A39CB", "Microsoft Edge",
                                                  "Windows Media Player", "Paint"};
    static const std::vector<std::string> system_exes = {"svchost", "notepad", "taskmgr",
                                                         "conhost", "cmd",     "SearchHost"};
    Row row;
    row.kind = Row::Kind::Bait;
    const std::uint64_t record = 3000 + rng.below(6000);
    const auto sec = [&](const std::string& id, const std::string& strings) {
        row.timestamp_desc = "Creation Time";
        row.source = "EVT";
        row.source_long = "WinEVTX";
        row.parser = "winevtx";
        row.display_name = "NTFS:\\Windows\\System32\\winevt\\Logs\\Security.evtx";
        row.message = security_event(id, strings, record);
    };
    switch (k % 8) {
    case 0: {
        const auto app = rng.pick(apps);
        row.timestamp_desc = "Content Modification Time";
        row.source = "REG";
        row.source_long = "Registry Key";
        row.parser = "winreg/winreg_default";
        row.display_name = "NTFS:\\Windows\\System32\\config\\SOFTWARE";
        row.message = "[HKEY_LOCAL_MACHINE\\Software\\RegisteredApplications] " + app +
                      ": [REG_SZ] Software\\Clients\\StartMenuInternet\\" + app + "\\Capabilities";
        break;
    }
    case 1: {
        const auto path =
            std::string("NTFS:\\Users\\User\\AppData\\Local\\Microsoft\\OneDrive\\") +
            (rng.below(2) ? "OneDrive.exe" : "logs\\Personal\\SyncDiagnostics.log");
        row.timestamp_desc = rng.pick(noise_descs);
        row.source = "FILE";
        row.source_long = "File stat";
        row.parser = "filestat";
        row.display_name = path;
        row.message = path + " Type: file";
        break;
    }
    case 2: {
        const auto path = "NTFS:\\Windows\\System32\\" + rng.pick(system_exes) + ".exe";
        row.timestamp_desc = rng.pick(noise_descs);
        row.source = "FILE";
        row.source_long = "File stat";
        row.parser = "filestat";
        row.display_name = path;
        row.message = path + " Type: file";
        break;
    }
    case 3:
        sec("[4616 / 0x1208]",
            "'S-1-5-19', 'LOCAL SERVICE', 'NT AUTHORITY', '0x3e5', "
            "'2023-12-27T00:40:01.1234560Z', '2023-12-27T00:40:01.1100000Z', '0x4cc', "
            "'C:\\\\Windows\\\\System32\\\\svchost.exe'");
        break;
    case 4:
        sec("[4616 / 0x1208]",
            "'S-1-5-18', 'WINDEV2311EVAL$', 'WORKGROUP', '0x3e7', "
            "'2023-12-27T00:41:10.0000000Z', '2023-12-27T00:41:09.9000000Z', '0x1b30', "
            "'C:\\\\Program Files\\\\VMware\\\\VMware Tools\\\\vmtoolsd.exe'");
        break;
    case 5:
        sec("[4625 / 0x1211]",
            "'S-1-0-0', '-', '-', '0x0', 'S-1-0-0', 'Administrator', 'WINDEV2311EVAL', "
            "'0xc000006d', '%%2313', '0xc000006a'");
        break;
    case 6:
        sec("[4720 / 0x1270]",
            "'backup_admin', 'WINDEV2311EVAL', 'S-1-5-21-1004', 'S-1-5-21-500', 'User', "
            "'WINDEV2311EVAL', '0x4a3f1'");
        break;
    default:
        sec("[1102 / 0x044e]", "'S-1-5-21-1001', 'User', 'WINDEV2311EVAL', '0x2f1b3'");
        break;
    }
    return row;
}

bool matches_any_analyzer(const LowLevelEvent& event) {
    for (const auto& spec : list_analyzers()) {
        if (match_row(spec, event)) {
            return true;
        }
    }
    return false;
}

LowLevelEvent as_event(const Row& row) {
    LowLevelEvent e;
    e.datetime = format_instant_iso(row.at);
    e.instant = row.at;
    e.timestamp_desc = row.timestamp_desc;
    e.source = row.source;
    e.source_long = row.source_long;
    e.message = row.message;
    e.parser = row.parser;
    e.display_name = row.display_name;
    e.tag = row.tag;
    return e;
}

std::vector<std::string> row_fields(const Row& row) {
    return {format_instant_iso(row.at), row.timestamp_desc, row.source,       row.source_long,
            row.message,                row.parser,         row.display_name, row.tag};
}

UtcInstant random_instant(Rng& rng, UtcInstant start, UtcInstant end) {
    const auto span = static_cast<std::uint64_t>((end - start).count());
    return start + Microseconds{static_cast<long long>(rng.below(span + 1))};
}

UtcInstant instant_field(const Json& obj, const char* name) {
    if (!obj.contains(name) || !obj.at(name).is_string()) {
        throw SpecError(std::string("scenario needs an instant field '") + name + "'");
    }
    const auto text = obj.at(name).get<std::string>();
    const auto at = parse_instant(text);
    if (!at) {
        throw SpecError("bad instant '" + text + "'");
    }
    return *at;
}

} // namespace

ScenarioSpec scenario_from_json(const Json& value) {
    if (!value.is_object()) {
        throw SpecError("scenario spec must be a JSON object");
    }
    ScenarioSpec spec;
    try {
        spec.seed = value.value("seed", std::uint64_t{1});
        const auto& span = value.at("time_span");
        spec.start = instant_field(span, "start");
        spec.end = instant_field(span, "end");
        spec.noise_rows = value.value("noise_rows", std::size_t{0});
        spec.bait_rows = value.value("bait_rows", std::size_t{0});
        if (value.contains("rules")) {
            spec.rules = load_rules(value.at("rules").dump());
        }
        const auto planted = value.value("planted", Json::array());
        for (const auto& item : planted) {
            PlantedEvent p;
            p.type = item.at("type").get<std::string>();
            p.at = instant_field(item, "at");
            const auto params = item.value("params", Json::object());
            for (const auto& [k, v] : params.items()) {
                p.params[k] = v.is_string() ? v.get<std::string>() : v.dump();
            }
            spec.planted.push_back(std::move(p));
        }
    } catch (const Json::exception& e) {
        throw SpecError(std::string("malformed scenario spec: ") + e.what());
    }
    return spec;
}

Json scenario_to_json(const ScenarioSpec& spec) {
    Json planted = Json::array();
    for (const auto& p : spec.planted) {
        Json params = Json::object();
        for (const auto& [k, v] : p.params) {
            params[k] = v;
        }
        planted.push_back(
            Json{{"type", p.type}, {"at", format_instant_iso(p.at)}, {"params", params}});
    }
    return Json{{"seed", spec.seed},
                {"time_span",
                 Json{{"start", format_instant_iso(spec.start)},
                      {"end", format_instant_iso(spec.end)}}},
                {"noise_rows", spec.noise_rows},
                {"bait_rows", spec.bait_rows},
                {"rules", rules_to_json(spec.rules)},
                {"planted", planted}};
}

ScenarioSpec reference_scenario(std::uint64_t seed, std::size_t noise_rows, std::size_t bait_rows) {
    const auto t = [](const char* text) { return *parse_instant(text); };
    ScenarioSpec spec;
    spec.seed = seed;
    spec.start = t("2023-12-27T00:30:00.000000+00:00");
    spec.end = t("2023-12-27T00:50:00.000000+00:00");
    spec.noise_rows = noise_rows;
    spec.bait_rows = bait_rows;
    spec.planted = {
        {"process-creation", t("2023-12-27T00:31:12.417233+00:00"), {}},
        {"bing-search", t("2023-12-27T00:32:40.102938+00:00"), {}},
        {"file-download", t("2023-12-27T00:34:05.660121+00:00"), {}},
        {"program-opened", t("2023-12-27T00:37:14.609465+00:00"), {}},
        {"recent-file-access", t("2023-12-27T00:39:51.004410+00:00"), {}},
        {"google-search", t("2023-12-27T00:42:18.775102+00:00"), {}},
        {"web-visit", t("2023-12-27T00:43:02.312877+00:00"), {}},
        {"last-shutdown", t("2023-12-27T00:48:30.250000+00:00"), {}},
    };
    return spec;
}

ForgeResult forge(const ScenarioSpec& spec) {
    if (spec.end < spec.start) {
        throw SpecError("time span ends before it starts");
    }
    Rng rng(spec.seed);
    std::vector<Row> rows;
    struct Expected {
        KeyValues keys;
        std::string description;
        std::string type_name;
        Category category;
    };
    std::vector<Expected> expected;

    for (std::size_t i = 0; i < spec.planted.size(); ++i) {
        const auto& p = spec.planted[i];
        if (p.at < spec.start || p.at > spec.end) {
            throw SpecError("planted " + p.type + " at " + format_instant_iso(p.at) +
                            " lies outside the time span");
        }
        Expected e;
        Row row = planted_row(p, rng, e.keys, e.description, e.type_name, e.category);
        row.planted_index = i;
        const auto event = as_event(row);
        for (const auto& analyzer : list_analyzers()) {
            const bool hit = match_row(analyzer, event).has_value();
            const bool own = analyzer.slug == p.type;
            if (hit != own) {
                throw SpecError("planted " + p.type + " row " +
                                (own ? "is not recognized by its analyzer"
                                     : "also triggers " + analyzer.slug));
            }
        }
        rows.push_back(std::move(row));
        expected.push_back(std::move(e));
    }

    std::vector<SearchPattern> presets;
    for (const auto& preset : preset_patterns()) {
        presets.emplace_back(preset.expression);
    }
    for (std::size_t i = 0; i < spec.bait_rows; ++i) {
        Row row = bait_row(rng, i);
        row.at = random_instant(rng, spec.start, spec.end);
        if (matches_any_analyzer(as_event(row))) {
            throw Error("internal: bait row triggers an analyzer: " + row.message);
        }
        rows.push_back(std::move(row));
    }
    for (std::size_t i = 0; i < spec.noise_rows; ++i) {
        Row row = noise_row(rng);
        row.at = random_instant(rng, spec.start, spec.end);
        const auto event = as_event(row);
        const auto line = csv_join(row_fields(row));
        bool dirty = matches_any_analyzer(event);
        for (const auto& rule : spec.rules) {
            dirty = dirty || row.message.find(rule.keyword) != std::string::npos;
        }
        for (const auto& pattern : presets) {
            dirty = dirty || pattern.matches(line);
        }
        if (dirty) {
            throw Error("internal: noise row matches a ground-truth selector: " + line);
        }
        rows.push_back(std::move(row));
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.at < b.at; });

    ForgeResult result;
    result.rules = spec.rules;
    result.csv = csv_join(columns) + "\n";
    for (const auto& row : rows) {
        result.csv += csv_join(row_fields(row)) + "\n";
    }
    result.timeline = parse_timeline(result.csv, ParseMode::Strict).timeline;

    // Expected events straight from the construction, in row order.
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.kind == Row::Kind::Noise) {
            result.noise_row_indices.push_back(r);
        }
        if (row.kind != Row::Kind::Planted) {
            continue;
        }
        const auto& e = expected[row.planted_index];
        const auto datetime = format_instant_iso(row.at);
        HighLevelEvent ev;
        ev.id = static_cast<long long>(result.expected_events.size()) + 1;
        ev.date_time_min = row.at;
        ev.date_time_max = row.at;
        ev.evidence_source = row.message;
        ev.type = e.type_name;
        ev.description = e.description;
        ev.category = e.category;
        ev.plugin = row.source + "-" + row.source_long + "-" + row.parser;
        ev.files = row.display_name;
        ev.keys = e.keys;
        const std::size_t lo = r >= 5 ? r - 5 : 0;
        const std::size_t hi = std::min(rows.size() - 1, r + 5);
        for (std::size_t k = lo; k <= hi; ++k) {
            if (k != r) {
                ev.supporting.push_back(
                    {format_instant_iso(rows[k].at), rows[k].message, rows[k].parser});
            }
        }
        const auto* spec_entry = find_analyzer(spec.planted[row.planted_index].type);
        ev.trigger = {datetime, row.message, row.parser, spec_entry->detectors.front().reason};
        result.expected_events.push_back(std::move(ev));
    }

    for (const auto& row : rows) {
        for (const auto& rule : spec.rules) {
            if (row.message.find(rule.keyword) != std::string::npos) {
                result.expected_detections.push_back(
                    {format_instant_iso(row.at), rule.event, rule.keyword, row.message});
            }
        }
    }

    for (const auto& pattern : presets) {
        result.grep_outputs.push_back(format_grep_output(grep_timeline(result.timeline, pattern)));
    }
    return result;
}

Timeline without_noise(const ForgeResult& result) {
    const auto& source = result.timeline;
    std::string csv = source.header_line() + "\n";
    std::size_t next_noise = 0;
    for (std::size_t i = 0; i < source.size(); ++i) {
        if (next_noise < result.noise_row_indices.size() &&
            result.noise_row_indices[next_noise] == i) {
            ++next_noise;
            continue;
        }
        csv += source[i].raw_line + "\n";
    }
    return parse_timeline(csv, ParseMode::Strict).timeline;
}

} // namespace tleval
