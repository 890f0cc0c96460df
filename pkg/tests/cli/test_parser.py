import contextlib
import io
from pathlib import Path
from unittest import TestCase

from cli.handlers import formats, handlers, output_dir
from cli.parser import COMMANDS, build_parser


class TestParser(TestCase):
    def setUp(self):
        self.parser = build_parser()

    def test_global_flags_before_command(self):
        args = self.parser.parse_args(
            ["--config", "c.toml", "--seed", "3", "--out", "o", "--format", "json", "--format", "md", "run", "--table", "t.csv"]
        )
        self.assertEqual(args.command, "run")
        self.assertEqual(args.config, Path("c.toml"))
        self.assertEqual(args.seed, 3)
        self.assertEqual(args.formats, ["json", "md"])
        self.assertEqual(args.table, Path("t.csv"))

    def test_peaks_arguments(self):
        args = self.parser.parse_args(["peaks", "a.csv", "b.csv", "--window", "1", "2.5", "--fraction", "0.1"])
        self.assertEqual(args.chromatograms, [Path("a.csv"), Path("b.csv")])
        self.assertEqual(args.window, [1.0, 2.5])
        self.assertIsNone(args.idle)
        self.assertEqual(args.fraction, 0.1)

    def test_required_arguments(self):
        for argv in ([], ["evaluate"], ["build-table", "--sheet", "s.csv"], ["--format", "pdf", "run"]):
            with contextlib.redirect_stderr(io.StringIO()):
                with self.assertRaises(SystemExit):
                    self.parser.parse_args(argv)

    def test_every_command_has_a_handler(self):
        self.assertEqual(set(handlers()), set(COMMANDS))

    def test_formats_and_output_dir(self):
        args = self.parser.parse_args(["--format", "md", "--format", "md", "report", "r.json"])
        self.assertEqual(formats(args), ("md",))
        self.assertEqual(formats(self.parser.parse_args(["report", "r.json"])), ("json", "csv", "md"))
        self.assertEqual(output_dir(args), Path("out"))
        self.assertEqual(output_dir(self.parser.parse_args(["--out", "x", "report", "r"])), Path("x"))
