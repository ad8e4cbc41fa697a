use std::fs;
use std::path::Path;

use muprecode::cli::{main_with_args, read_table, GAP_FILE, LOG_FILE, MANIFEST_FILE, PLOT_FILE, TABLE_FILE};
use tempfile::tempdir;

fn run(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("muprecode").chain(args.iter().copied()))
}

fn quick_sweep(out: &Path, extra: &[&str]) -> i32 {
    let out = out.to_str().unwrap();
    let mut args = vec![
        "sweep",
        "--realizations",
        "12",
        "--frames",
        "2",
        "--symbols",
        "20",
        "--out",
        out,
    ];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn repeated_sweeps_are_byte_identical() {
    let dir = tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(quick_sweep(&a, &["--seed", "42"]), 0);
    assert_eq!(quick_sweep(&b, &["--seed", "42", "--workers", "3"]), 0);
    for file in [TABLE_FILE, GAP_FILE, PLOT_FILE, LOG_FILE] {
        assert_eq!(
            fs::read(a.join(file)).unwrap(),
            fs::read(b.join(file)).unwrap(),
            "{file}"
        );
    }
    let manifest = |d: &Path| {
        fs::read_to_string(d.join(MANIFEST_FILE))
            .unwrap()
            .replace(d.to_str().unwrap(), "")
    };
    assert_eq!(manifest(&a), manifest(&b));
}

#[test]
fn default_layout_gives_twelve_records() {
    let dir = tempdir().unwrap();
    assert_eq!(quick_sweep(dir.path(), &[]), 0);
    let records = read_table(&dir.path().join(TABLE_FILE)).unwrap();
    assert_eq!(records.len(), 12);
    let text = fs::read_to_string(dir.path().join(TABLE_FILE)).unwrap();
    assert!(text.starts_with("snr_db,scheme,u,m,bit_errors,bits_total,ber,std_err,low_confidence\n"));
    assert_eq!(
        fs::read_to_string(dir.path().join(LOG_FILE)).unwrap().lines().count(),
        12
    );
}

#[test]
fn table_round_trips_through_the_reader() {
    let dir = tempdir().unwrap();
    assert_eq!(quick_sweep(dir.path(), &["--snr", "-2,8"]), 0);
    let records = read_table(&dir.path().join(TABLE_FILE)).unwrap();
    let text = fs::read_to_string(dir.path().join(TABLE_FILE)).unwrap();
    for (line, r) in text.lines().skip(1).zip(&records) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[0].parse::<f64>().unwrap(), r.snr_db);
        assert_eq!(cols[1], r.scheme);
        assert_eq!(cols[4].parse::<u64>().unwrap(), r.bit_errors);
        assert_eq!(cols[5].parse::<u64>().unwrap(), r.bits_total);
        assert_eq!(cols[6], muprecode::cli::format_rate(r.ber()));
        assert_eq!(cols[8], r.low_confidence().to_string());
    }
    assert_eq!(records.len(), 8);
}

#[test]
fn plot_series_carry_the_table_rates() {
    let dir = tempdir().unwrap();
    assert_eq!(quick_sweep(dir.path(), &["--snr", "0,10"]), 0);
    let table = fs::read_to_string(dir.path().join(TABLE_FILE)).unwrap();
    let plot = fs::read_to_string(dir.path().join(PLOT_FILE)).unwrap();
    assert!(plot.starts_with('#'));

    let key = |snr: &str, scheme: &str| format!("{snr}/{scheme}");
    let mut from_table: Vec<(String, String)> = table
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<_> = l.split(',').collect();
            (key(c[0], c[1]), c[6].to_string())
        })
        .collect();
    let plot_rows: Vec<&str> = plot.lines().skip(2).collect();
    let mut from_plot: Vec<(String, String)> = plot_rows
        .iter()
        .map(|l| {
            let c: Vec<_> = l.split(',').collect();
            (key(c[0], c[1]), c[2].to_string())
        })
        .collect();

    // Grouped by series: each scheme's rows are contiguous.
    let series: Vec<&str> = plot_rows.iter().map(|l| l.split(',').nth(1).unwrap()).collect();
    let mut seen: Vec<&str> = Vec::new();
    for s in series.windows(2) {
        if s[0] != s[1] {
            assert!(!seen.contains(&s[1]));
            seen.push(s[0]);
        }
    }
    from_table.sort();
    from_plot.sort();
    assert_eq!(from_table, from_plot);
}

#[test]
fn point_writes_a_single_record() {
    let dir = tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = run(&[
        "point",
        "--scheme",
        "ulmmsep",
        "--snr",
        "12",
        "--realizations",
        "10",
        "--frames",
        "1",
        "--symbols",
        "10",
        "--out",
        out,
    ]);
    assert_eq!(code, 0);
    let records = read_table(&dir.path().join(TABLE_FILE)).unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].scheme, "ULMMSEP");
    assert_eq!(records[0].snr_db, 12.0);
    assert_eq!(records[0].bits_total, 10 * 10 * 16);
}

#[test]
fn gaps_are_recomputed_from_a_table() {
    let dir = tempdir().unwrap();
    let table = dir.path().join("table.csv");
    fs::write(
        &table,
        "snr_db,scheme,u,m,bit_errors,bits_total,ber,std_err,low_confidence\n\
         14,LZFP,0,0,150,1000,1.50e-1,0,false\n\
         14,LMMSEP,0,1,40,1000,4.00e-2,0,false\n\
         14,ULZFP,1,0,6,1000,6.00e-3,0,true\n\
         14,ULMMSEP,1,1,5,1000,5.00e-3,0,true\n",
    )
    .unwrap();
    let out = dir.path().join("gaps.csv");
    assert_eq!(
        run(&["gaps", table.to_str().unwrap(), "--out", out.to_str().unwrap()]),
        0
    );
    assert_eq!(
        fs::read_to_string(&out).unwrap(),
        "snr_db,scheme_a,scheme_b,gap\n14,LZFP,LMMSEP,1.10e-1\n14,ULZFP,ULMMSEP,1.00e-3\n"
    );
}

#[test]
fn exit_codes_follow_the_error_class() {
    let dir = tempdir().unwrap();
    let config = dir.path().join("bad.cfg");
    fs::write(&config, "k_at = 9\n").unwrap();
    let out = dir.path().join("out");
    assert_eq!(
        run(&[
            "sweep",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ]),
        1
    );
    assert!(!out.exists());

    assert_eq!(run(&["sweep", "--schemes", "ZF", "--out", out.to_str().unwrap()]), 1);
    assert_eq!(run(&["sweep", "--bogus"]), 1);
    assert_eq!(
        run(&[
            "point",
            "--scheme",
            "LZFP",
            "--snr",
            "10,20",
            "--out",
            out.to_str().unwrap()
        ]),
        1
    );

    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let nested = blocker.join("sub");
    assert_eq!(quick_sweep(&nested, &["--snr", "10"]), 3);

    let missing = dir.path().join("missing.csv");
    assert_eq!(run(&["gaps", missing.to_str().unwrap()]), 3);
    fs::write(&missing, "a,b\n1,2\n").unwrap();
    assert_eq!(run(&["gaps", missing.to_str().unwrap()]), 3);
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempdir().unwrap();
    let config = dir.path().join("run.cfg");
    fs::write(&config, "# small run\nschemes = LZFP, LMMSEP\nsnr_db_list = [5]\nn_realizations = 4\nframes_per_realization = 1\nsymbols_per_frame = 5\n").unwrap();
    let out = dir.path().join("o");
    assert_eq!(
        run(&[
            "sweep",
            "--config",
            config.to_str().unwrap(),
            "--snr",
            "5,15",
            "--out",
            out.to_str().unwrap()
        ]),
        0
    );
    let records = read_table(&out.join(TABLE_FILE)).unwrap();
    assert_eq!(records.len(), 4);
    assert!(records.iter().all(|r| r.bits_total == 4 * 5 * 16));
}
