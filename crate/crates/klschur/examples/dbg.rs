use klschur::decomp;
use klschur::multipartitions::Charge;

fn rss_mb() -> f64 {
    let s = std::fs::read_to_string("/proc/self/status").unwrap_or_default();
    for line in s.lines() {
        if let Some(rest) = line.strip_prefix("VmRSS:") {
            let kb: f64 = rest.trim().trim_end_matches(" kB").trim().parse().unwrap_or(0.0);
            return kb / 1024.0;
        }
    }
    0.0
}

fn main() {
    let chg = Charge::new(3, vec![0, 0]).unwrap();
    let blocks = klschur::multipartitions::blocks_for_size(&chg, 4).unwrap();
    for (d, labels) in &blocks {
        let t0 = std::time::Instant::now();
        let bm = decomp::block_matrices(&chg, d, None).unwrap();
        println!(
            "block {} labels={} {:.1}s rss={:.0}MB",
            d,
            labels.len(),
            t0.elapsed().as_secs_f64(),
            rss_mb()
        );
        for (i, row) in bm.d.iter().enumerate() {
            let line: Vec<String> = row.iter().map(|p| p.to_string()).collect();
            println!("  {} | {}", bm.labels[i], line.join("  "));
        }
        klschur::hecke::clear_parabolic_caches();
        println!("  after clear rss={:.0}MB", rss_mb());
    }
}
