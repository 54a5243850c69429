#include "vigil/edf.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace vigil::edf {

namespace {

constexpr std::size_t kGlobalHeaderBytes = 256;
constexpr std::size_t kSignalHeaderBytes = 256;
constexpr char kAnnotationsLabel[] = "EDF Annotations";

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r\n\0", 0, 5);
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n\0", std::string_view::npos, 5);
    return std::string(s.substr(begin, end - begin + 1));
}

[[noreturn]] void fail_field(std::string_view field, std::string_view raw) {
    throw InputError("edf: non-numeric value in field '" + std::string(field) +
                     "': \"" + std::string(raw) + "\"");
}

long parse_long(std::string_view raw, std::string_view field) {
    std::string t = trim(raw);
    if (!t.empty() && t.front() == '+') t.erase(t.begin());
    if (t.empty()) fail_field(field, raw);
    long value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size()) fail_field(field, raw);
    return value;
}

double parse_double(std::string_view raw, std::string_view field) {
    std::string t = trim(raw);
    if (!t.empty() && t.front() == '+') t.erase(t.begin());
    if (t.empty()) fail_field(field, raw);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size()) fail_field(field, raw);
    return value;
}

// Sequential reader over the fixed-width ASCII header.
class FieldReader {
  public:
    explicit FieldReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::string_view take(std::size_t width) {
        assert(pos_ + width <= bytes_.size());
        const auto* p = reinterpret_cast<const char*>(bytes_.data()) + pos_;
        pos_ += width;
        return {p, width};
    }

    std::size_t pos() const { return pos_; }

  private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

// Fixed-width ASCII writer; pads with spaces, refuses oversized values.
class FieldWriter {
  public:
    explicit FieldWriter(std::vector<std::uint8_t>& out) : out_(out) {}

    void put(std::string_view value, std::size_t width, std::string_view field) {
        if (value.size() > width)
            throw InputError("edf: field '" + std::string(field) + "' value \"" +
                             std::string(value) + "\" exceeds " + std::to_string(width) +
                             " characters");
        for (char c : value) out_.push_back(static_cast<std::uint8_t>(c));
        for (std::size_t i = value.size(); i < width; ++i) out_.push_back(' ');
    }

    void put_long(long value, std::size_t width, std::string_view field) {
        put(std::to_string(value), width, field);
    }

    void put_double(double value, std::size_t width, std::string_view field);

  private:
    std::vector<std::uint8_t>& out_;
};

// Render a numeric header value into at most `width` ASCII characters:
// whole numbers verbatim, anything else at the highest precision that
// fits. Empty when even one significant digit will not fit.
std::string format_numeric_field(double value, std::size_t width) {
    if (value == std::floor(value) && std::abs(value) < 1e15) {
        std::string s = std::to_string(static_cast<long long>(value));
        if (s.size() <= width) return s;
    }
    char buf[64];
    for (int prec = static_cast<int>(width); prec >= 1; --prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, value);
        if (std::strlen(buf) <= width) return buf;
    }
    return {};
}

void FieldWriter::put_double(double value, std::size_t width, std::string_view field) {
    const std::string s = format_numeric_field(value, width);
    if (s.empty())
        throw InputError("edf: numeric field '" + std::string(field) +
                         "' does not fit in " + std::to_string(width) + " characters");
    put(s, width, field);
}

// The value a `width`-character header field actually carries after a
// write/parse cycle. Authoring paths store this up front so an
// in-memory recording and its file agree bit for bit.
double storable_number(double value, std::size_t width, std::string_view field) {
    const std::string s = format_numeric_field(value, width);
    if (s.empty())
        throw InputError("edf: numeric field '" + std::string(field) + "' value " +
                         std::to_string(value) + " does not fit in " +
                         std::to_string(width) + " characters");
    return parse_double(s, field);
}

void validate_signal_header(const SignalHeader& sh, std::size_t index) {
    const std::string where = "signal " + std::to_string(index) + " (\"" + sh.label + "\")";
    if (sh.digital_min >= sh.digital_max)
        throw InputError("edf: " + where + ": digital_min >= digital_max");
    if (sh.digital_min < -32768 || sh.digital_max > 32767)
        throw InputError("edf: " + where + ": digital range exceeds 16-bit storage");
    if (sh.physical_min == sh.physical_max)
        throw InputError("edf: " + where + ": physical_min equals physical_max");
    if (sh.samples_per_record < 1)
        throw InputError("edf: " + where + ": samples_per_record < 1");
}

}  // namespace

double EdfRecording::sample_rate_hz(std::size_t signal_index) const {
    return signals.at(signal_index).samples_per_record / header.record_duration_s;
}

double EdfRecording::duration_s() const {
    return header.num_records * header.record_duration_s;
}

bool EdfRecording::is_annotation(std::size_t signal_index) const {
    return trim(signals.at(signal_index).label) == kAnnotationsLabel;
}

double digital_to_physical(int d, const SignalHeader& cal) {
    const double gain = (cal.physical_max - cal.physical_min) /
                        (static_cast<double>(cal.digital_max) - cal.digital_min);
    return cal.physical_min + (d - static_cast<double>(cal.digital_min)) * gain;
}

int16_t physical_to_digital(double p, const SignalHeader& cal) {
    const double gain = (static_cast<double>(cal.digital_max) - cal.digital_min) /
                        (cal.physical_max - cal.physical_min);
    const double d = (p - cal.physical_min) * gain + cal.digital_min;
    const long long q = std::llround(d);
    if (q < cal.digital_min || q > cal.digital_max)
        throw InputError("edf: physical value " + std::to_string(p) +
                         " outside calibrated range [" + std::to_string(cal.physical_min) +
                         ", " + std::to_string(cal.physical_max) + "]");
    return static_cast<int16_t>(q);
}

EdfRecording parse_edf(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kGlobalHeaderBytes)
        throw InputError("edf: file too short for the 256-byte global header (" +
                         std::to_string(bytes.size()) + " bytes)");

    FieldReader reader(bytes);
    EdfRecording rec;
    EdfHeader& hdr = rec.header;

    hdr.version = trim(reader.take(8));
    hdr.patient_id = trim(reader.take(80));
    hdr.recording_id = trim(reader.take(80));
    hdr.start_date = trim(reader.take(8));
    hdr.start_time = trim(reader.take(8));
    hdr.header_bytes = static_cast<int>(parse_long(reader.take(8), "header_bytes"));
    hdr.reserved = trim(reader.take(44));
    const std::string_view num_records_raw = reader.take(8);
    hdr.record_duration_s = parse_double(reader.take(8), "record_duration");
    hdr.num_signals = static_cast<int>(parse_long(reader.take(4), "num_signals"));

    if (hdr.reserved.rfind("EDF+D", 0) == 0)
        throw InputError("edf: discontinuous EDF+D recordings are not supported");
    if (hdr.num_signals < 1)
        throw InputError("edf: num_signals must be >= 1, got " + std::to_string(hdr.num_signals));
    if (hdr.record_duration_s <= 0)
        throw InputError("edf: record duration must be positive, got " +
                         std::to_string(hdr.record_duration_s));
    const std::size_t want_header =
        kGlobalHeaderBytes + kSignalHeaderBytes * static_cast<std::size_t>(hdr.num_signals);
    if (static_cast<std::size_t>(hdr.header_bytes) != want_header)
        throw InputError("edf: header_bytes field says " + std::to_string(hdr.header_bytes) +
                         ", expected 256 + 256 * " + std::to_string(hdr.num_signals) + " = " +
                         std::to_string(want_header));
    if (bytes.size() < want_header)
        throw InputError("edf: file truncated inside the signal header block");

    // num_records may be blank or -1 (unknown); resolved from the file size below.
    const std::string num_records_txt = trim(num_records_raw);
    hdr.num_records =
        num_records_txt.empty() ? -1 : static_cast<int>(parse_long(num_records_raw, "num_records"));

    // Signal headers are stored field-major: all labels, then all transducers, ...
    const std::size_t ns = static_cast<std::size_t>(hdr.num_signals);
    rec.signals.resize(ns);
    for (auto& s : rec.signals) s.label.clear();
    for (std::size_t i = 0; i < ns; ++i) rec.signals[i].label = trim(reader.take(16));
    for (std::size_t i = 0; i < ns; ++i) rec.signals[i].transducer = trim(reader.take(80));
    for (std::size_t i = 0; i < ns; ++i) rec.signals[i].physical_dim = trim(reader.take(8));
    for (std::size_t i = 0; i < ns; ++i)
        rec.signals[i].physical_min = parse_double(reader.take(8), "physical_min");
    for (std::size_t i = 0; i < ns; ++i)
        rec.signals[i].physical_max = parse_double(reader.take(8), "physical_max");
    for (std::size_t i = 0; i < ns; ++i)
        rec.signals[i].digital_min = static_cast<int>(parse_long(reader.take(8), "digital_min"));
    for (std::size_t i = 0; i < ns; ++i)
        rec.signals[i].digital_max = static_cast<int>(parse_long(reader.take(8), "digital_max"));
    for (std::size_t i = 0; i < ns; ++i) rec.signals[i].prefiltering = trim(reader.take(80));
    for (std::size_t i = 0; i < ns; ++i)
        rec.signals[i].samples_per_record =
            static_cast<int>(parse_long(reader.take(8), "samples_per_record"));
    for (std::size_t i = 0; i < ns; ++i) rec.signals[i].reserved = trim(reader.take(32));
    assert(reader.pos() == want_header);

    std::size_t record_samples = 0;
    for (std::size_t i = 0; i < ns; ++i) {
        validate_signal_header(rec.signals[i], i);
        record_samples += static_cast<std::size_t>(rec.signals[i].samples_per_record);
    }
    const std::size_t record_bytes = record_samples * 2;

    const std::size_t data_bytes = bytes.size() - want_header;
    if (hdr.num_records < 0) {
        if (record_bytes == 0 || data_bytes % record_bytes != 0)
            throw InputError("edf: cannot resolve unknown record count: " +
                             std::to_string(data_bytes) + " data bytes is not a multiple of the " +
                             std::to_string(record_bytes) + "-byte record size");
        hdr.num_records = static_cast<int>(data_bytes / record_bytes);
    } else if (data_bytes != static_cast<std::size_t>(hdr.num_records) * record_bytes) {
        throw InputError("edf: truncated or oversized file: " + std::to_string(data_bytes) +
                         " data bytes, expected " + std::to_string(hdr.num_records) + " records x " +
                         std::to_string(record_bytes) + " bytes");
    }

    rec.digital.resize(ns);
    rec.physical.resize(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        const std::size_t count = static_cast<std::size_t>(hdr.num_records) *
                                  static_cast<std::size_t>(rec.signals[i].samples_per_record);
        rec.digital[i].reserve(count);
        rec.physical[i].reserve(count);
    }

    // Records interleave the signals: all of signal 0's chunk, then signal 1's, ...
    const std::uint8_t* p = bytes.data() + want_header;
    for (int r = 0; r < hdr.num_records; ++r) {
        for (std::size_t i = 0; i < ns; ++i) {
            const auto& sh = rec.signals[i];
            const double gain = (sh.physical_max - sh.physical_min) /
                                (static_cast<double>(sh.digital_max) - sh.digital_min);
            for (int j = 0; j < sh.samples_per_record; ++j) {
                const auto lo = static_cast<std::uint16_t>(p[0]);
                const auto hi = static_cast<std::uint16_t>(p[1]);
                p += 2;
                const auto d = static_cast<int16_t>(lo | (hi << 8));
                rec.digital[i].push_back(d);
                rec.physical[i].push_back(sh.physical_min +
                                          (d - static_cast<double>(sh.digital_min)) * gain);
            }
        }
    }

    for (std::size_t i = 0; i < ns; ++i) {
        const std::size_t want = static_cast<std::size_t>(hdr.num_records) *
                                 static_cast<std::size_t>(rec.signals[i].samples_per_record);
        if (rec.digital[i].size() != want)
            throw InputError("edf: sample accounting failed for signal " + std::to_string(i));
    }
    return rec;
}

std::vector<std::uint8_t> write_edf(const EdfRecording& recording) {
    const EdfHeader& hdr = recording.header;
    const std::size_t ns = recording.signals.size();
    if (ns == 0) throw InputError("edf: cannot write a recording with no signals");
    if (recording.digital.size() != ns)
        throw InputError("edf: digital sample block count does not match signal count");
    if (hdr.record_duration_s <= 0)
        throw InputError("edf: record duration must be positive");

    // Every signal must contribute the same whole number of records.
    long num_records = -1;
    for (std::size_t i = 0; i < ns; ++i) {
        validate_signal_header(recording.signals[i], i);
        const auto spr = static_cast<std::size_t>(recording.signals[i].samples_per_record);
        if (recording.digital[i].size() % spr != 0)
            throw InputError("edf: signal " + std::to_string(i) +
                             " sample count is not a multiple of samples_per_record");
        const long records = static_cast<long>(recording.digital[i].size() / spr);
        if (num_records < 0) num_records = records;
        if (records != num_records)
            throw InputError("edf: signals disagree on the number of data records");
        for (int16_t d : recording.digital[i]) {
            if (d < recording.signals[i].digital_min || d > recording.signals[i].digital_max)
                throw InputError("edf: signal " + std::to_string(i) +
                                 " holds a sample outside its digital range");
        }
    }

    std::vector<std::uint8_t> out;
    std::size_t record_samples = 0;
    for (const auto& s : recording.signals)
        record_samples += static_cast<std::size_t>(s.samples_per_record);
    out.reserve(kGlobalHeaderBytes + kSignalHeaderBytes * ns +
                static_cast<std::size_t>(num_records) * record_samples * 2);

    FieldWriter w(out);
    w.put(hdr.version.empty() ? "0" : hdr.version, 8, "version");
    w.put(hdr.patient_id, 80, "patient_id");
    w.put(hdr.recording_id, 80, "recording_id");
    w.put(hdr.start_date.empty() ? "01.01.00" : hdr.start_date, 8, "start_date");
    w.put(hdr.start_time.empty() ? "00.00.00" : hdr.start_time, 8, "start_time");
    w.put_long(static_cast<long>(kGlobalHeaderBytes + kSignalHeaderBytes * ns), 8, "header_bytes");
    w.put(hdr.reserved, 44, "reserved");
    w.put_long(num_records, 8, "num_records");
    w.put_double(hdr.record_duration_s, 8, "record_duration");
    w.put_long(static_cast<long>(ns), 4, "num_signals");

    for (const auto& s : recording.signals) w.put(s.label, 16, "label");
    for (const auto& s : recording.signals) w.put(s.transducer, 80, "transducer");
    for (const auto& s : recording.signals) w.put(s.physical_dim, 8, "physical_dim");
    for (const auto& s : recording.signals) w.put_double(s.physical_min, 8, "physical_min");
    for (const auto& s : recording.signals) w.put_double(s.physical_max, 8, "physical_max");
    for (const auto& s : recording.signals) w.put_long(s.digital_min, 8, "digital_min");
    for (const auto& s : recording.signals) w.put_long(s.digital_max, 8, "digital_max");
    for (const auto& s : recording.signals) w.put(s.prefiltering, 80, "prefiltering");
    for (const auto& s : recording.signals) w.put_long(s.samples_per_record, 8, "samples_per_record");
    for (const auto& s : recording.signals) w.put(s.reserved, 32, "reserved");

    for (long r = 0; r < num_records; ++r) {
        for (std::size_t i = 0; i < ns; ++i) {
            const auto spr = static_cast<std::size_t>(recording.signals[i].samples_per_record);
            const int16_t* chunk = recording.digital[i].data() + static_cast<std::size_t>(r) * spr;
            for (std::size_t j = 0; j < spr; ++j) {
                const auto u = static_cast<std::uint16_t>(chunk[j]);
                out.push_back(static_cast<std::uint8_t>(u & 0xff));
                out.push_back(static_cast<std::uint8_t>(u >> 8));
            }
        }
    }
    return out;
}

EdfRecording read_edf_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("edf: cannot open \"" + path.string() + "\" for reading");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("edf: read failure on \"" + path.string() + "\"");
    return parse_edf(bytes);
}

void save_edf(const EdfRecording& recording, const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = write_edf(recording);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("edf: cannot open \"" + path.string() + "\" for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("edf: write failure on \"" + path.string() + "\"");
}

ChannelView select_channel(const EdfRecording& recording, std::string_view label) {
    const std::string wanted = trim(label);
    std::size_t found = recording.signals.size();
    int matches = 0;
    for (std::size_t i = 0; i < recording.signals.size(); ++i) {
        if (recording.is_annotation(i)) continue;
        if (recording.signals[i].label == wanted) {
            found = i;
            ++matches;
        }
    }
    if (matches == 0) {
        std::ostringstream msg;
        msg << "edf: no channel labeled \"" << wanted << "\"; available:";
        for (const auto& l : channel_labels(recording)) msg << " \"" << l << "\"";
        throw InputError(msg.str());
    }
    if (matches > 1)
        throw InputError("edf: channel label \"" + wanted + "\" is ambiguous (" +
                         std::to_string(matches) + " signals carry it)");
    return ChannelView{recording.physical[found], recording.sample_rate_hz(found), found};
}

std::vector<std::string> channel_labels(const EdfRecording& recording) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < recording.signals.size(); ++i)
        if (!recording.is_annotation(i)) labels.push_back(recording.signals[i].label);
    return labels;
}

EdfRecording make_recording(const std::vector<SyntheticChannel>& channels,
                            double record_duration_s) {
    if (channels.empty()) throw InputError("edf: make_recording needs at least one channel");
    if (record_duration_s <= 0) throw InputError("edf: record duration must be positive");

    EdfRecording rec;
    rec.header.version = "0";
    rec.header.patient_id = "X X X X";
    rec.header.recording_id = "Startdate 01-JAN-2000 X X X";
    rec.header.start_date = "01.01.00";
    rec.header.start_time = "00.00.00";
    // Every numeric header field is stored as the value its fixed-width
    // ASCII rendering carries, so writing and re-parsing the recording
    // reproduces it exactly.
    rec.header.record_duration_s = storable_number(record_duration_s, 8, "record_duration");
    rec.header.num_signals = static_cast<int>(channels.size());
    rec.header.header_bytes = static_cast<int>(kGlobalHeaderBytes + kSignalHeaderBytes * channels.size());

    long num_records = -1;
    for (const auto& ch : channels) {
        const double spr_exact = ch.sample_rate_hz * rec.header.record_duration_s;
        const auto spr = static_cast<long>(std::llround(spr_exact));
        if (spr < 1 || std::abs(spr_exact - static_cast<double>(spr)) > 1e-9)
            throw InputError("edf: channel \"" + ch.label + "\": sample_rate * record_duration = " +
                             std::to_string(spr_exact) + " is not a positive integer");
        if (ch.samples.empty() || ch.samples.size() % static_cast<std::size_t>(spr) != 0)
            throw InputError("edf: channel \"" + ch.label + "\": " +
                             std::to_string(ch.samples.size()) +
                             " samples is not a whole number of " + std::to_string(spr) +
                             "-sample records");
        const long records = static_cast<long>(ch.samples.size() / static_cast<std::size_t>(spr));
        if (num_records < 0) num_records = records;
        if (records != num_records)
            throw InputError("edf: channels disagree on recording length");

        SignalHeader sh;
        sh.label = ch.label;
        sh.transducer = "synthetic";
        sh.physical_dim = ch.physical_dim;
        sh.physical_min = storable_number(ch.physical_min, 8, "physical_min");
        sh.physical_max = storable_number(ch.physical_max, 8, "physical_max");
        sh.digital_min = ch.digital_min;
        sh.digital_max = ch.digital_max;
        sh.samples_per_record = static_cast<int>(spr);
        validate_signal_header(sh, rec.signals.size());

        // Samples are validated against the declared range, then
        // quantized against the stored one; the two differ by at most
        // the field's decimal rounding, well under half a code step, so
        // boundary values are clamped rather than rejected.
        const double gain = (static_cast<double>(sh.digital_max) - sh.digital_min) /
                            (sh.physical_max - sh.physical_min);
        std::vector<int16_t> digital;
        digital.reserve(ch.samples.size());
        std::vector<double> physical;
        physical.reserve(ch.samples.size());
        for (double p : ch.samples) {
            if (!(p >= ch.physical_min && p <= ch.physical_max))
                throw InputError("edf: channel \"" + ch.label + "\": sample value " +
                                 std::to_string(p) + " outside the physical range [" +
                                 std::to_string(ch.physical_min) + ", " +
                                 std::to_string(ch.physical_max) + "]");
            const long long q = std::clamp(
                std::llround((p - sh.physical_min) * gain + sh.digital_min),
                static_cast<long long>(sh.digital_min), static_cast<long long>(sh.digital_max));
            const auto d = static_cast<int16_t>(q);
            digital.push_back(d);
            physical.push_back(digital_to_physical(d, sh));
        }
        rec.signals.push_back(std::move(sh));
        rec.digital.push_back(std::move(digital));
        rec.physical.push_back(std::move(physical));
    }
    rec.header.num_records = static_cast<int>(num_records);
    return rec;
}

}  // namespace vigil::edf
