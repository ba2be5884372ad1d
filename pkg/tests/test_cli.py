import json
import subprocess
import sys

from treeavg.evalio.cli import main
from treeavg.evalio.treebank import read_treebank


def gen(tmp_path, *extra):
    out = tmp_path / "gen"
    assert main(["gen", "--sentences", "12", "--n", "9", "--k", "3", "--fanout", "2", "--seed", "4", "-o", str(out), *extra]) == 0
    return out


def test_gen_writes_files_and_manifest(tmp_path):
    out = gen(tmp_path)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["individuals"] == ["ind1.discbracket", "ind2.discbracket", "ind3.discbracket"]
    banks = [read_treebank(out / name) for name in manifest["individuals"]]
    assert all(len(b) == 12 for b in banks)
    assert [r.n for r in banks[0]] == [r.n for r in banks[2]]
    again = gen(tmp_path / "again")
    assert (again / "ind2.discbracket").read_bytes() == (out / "ind2.discbracket").read_bytes()


def test_average_of_copies_is_identity(tmp_path):
    src = gen(tmp_path) / "ind1.discbracket"
    out = tmp_path / "avg.discbracket"
    assert main(["average", "--inputs", str(src), str(src), str(src), "-o", str(out)]) == 0
    assert out.read_bytes() == src.read_bytes()


def test_running_example_end_to_end(tmp_path, capsys):
    lines = ["(ROOT (o 0=a 1=b) 2=c)", "(ROOT (o 0=a 1=b) 2=c)", "(ROOT 0=a (o 1=b 2=c))"]
    files = []
    for i, line in enumerate(lines):
        p = tmp_path / f"t{i}.discbracket"
        p.write_text(line + "\n")
        files.append(str(p))
    out = tmp_path / "avg.discbracket"
    for engine in ("mitm", "exhaustive", "dp"):
        assert main(["average", "--inputs", *files, "--engine", engine, "-o", str(out)]) == 0
        assert out.read_text() == lines[0] + "\n"
    assert main(["eval", "--pred", str(out), "--gold", files[0]]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "F1 overall/cont/disco: 100.0 / 100.0 / 0.0"
    assert main(["average", "--inputs", *files, "--weights", "1,0,3", "-o", str(out)]) == 0
    assert out.read_text() == lines[2] + "\n"


def test_eval_self_and_json(tmp_path, capsys):
    ref = gen(tmp_path) / "reference.discbracket"
    assert main(["eval", "--pred", str(ref), "--gold", str(ref)]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "F1 overall/cont/disco: 100.0 / 100.0 / 100.0"
    assert main(["eval", "--pred", str(ref), "--gold", str(ref), "--format", "json", "--per-label"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["disco"]["f1"] == 100.0
    assert report["per_label"]["o"]["recall"] == 100.0


def test_jobs_do_not_change_output(tmp_path):
    out = gen(tmp_path, "--agreement", "0.5")
    inputs = [str(out / f"ind{j}.discbracket") for j in (1, 2, 3)]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["average", "--inputs", *inputs, "-o", str(a)]) == 0
    assert main(["average", "--inputs", *inputs, "--jobs", "3", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_bench(tmp_path, capsys):
    out = gen(tmp_path)
    inputs = [str(out / f"ind{j}.discbracket") for j in (1, 2, 3)]
    assert main(["bench", "--inputs", *inputs, "--engines", "mitm,exhaustive,dp"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split() == ["sent", "n", "cand", "mitm", "exhaustive", "dp"]
    assert len(lines) == 12 + 2


def test_exit_codes(tmp_path):
    good = tmp_path / "good.discbracket"
    good.write_text("(ROOT (o 0=a 1=b) 2=c)\n")
    bad = tmp_path / "bad.discbracket"
    bad.write_text("(ROOT (o 0=a 1=b) 2=c)\n(ROOT 0=a (o 1=b)\n")
    out = tmp_path / "out.discbracket"
    assert main(["average", "--inputs", str(good), str(bad), "-o", str(out)]) == 2
    assert not out.exists()
    assert main(["average", "--inputs", str(good), "--weights", "1,2", "-o", str(out)]) == 1
    assert main(["average", "--inputs", str(good), "--engine", "nope", "-o", str(out)]) == 1
    files = []
    for i, line in enumerate(["(ROOT (o 0=a 1=b) 2=c)"] * 2 + ["(ROOT 0=a (o 1=b 2=c))"]):
        files.append(tmp_path / f"r{i}.discbracket")
        files[-1].write_text(line + "\n")
    args = ["average", "--inputs", *map(str, files), "--max-candidates", "0", "-o", str(out)]
    assert main(args + ["--no-fallback"]) == 3
    assert not out.exists()
    assert main(args) == 0
    # fan-out 3 is beyond the dp as well
    wide = tmp_path / "wide.discbracket"
    wide.write_text("(ROOT (o 0=a 2=b 4=c) 1=d 3=e)\n")
    assert main(["average", "--inputs", str(wide), str(wide), "-o", str(out)]) == 3
    short = tmp_path / "short.discbracket"
    short.write_text("(ROOT 0=a 1=b)\n")
    assert main(["average", "--inputs", str(wide), str(short), "-o", str(out)]) == 2
    assert list(tmp_path.glob(".*tmp")) == []


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "treeavg", "gen", "--sentences", "1", "--n", "3", "--k", "1", "-o", str(tmp_path)], capture_output=True)
    assert proc.returncode == 0
    proc = subprocess.run([sys.executable, "-m", "treeavg"], capture_output=True)
    assert proc.returncode == 1
