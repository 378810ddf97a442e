//! Weight-file and config-file round trips.

use tact_pwm::config::RunConfig;
use tact_pwm::network::{load_weights, save_weights, WeightMatrix};

fn main() -> tact_pwm::Result<()> {
    let m = WeightMatrix::from_rows(&[vec![1, -1, 1], vec![-1, -1, 1]])?;
    let dir = std::env::temp_dir().join("tact-pwm-example");
    std::fs::create_dir_all(&dir).map_err(|e| tact_pwm::Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    let path = dir.join("layer.w");
    save_weights(&m, &path)?;
    print!("{}", std::fs::read_to_string(&path).unwrap_or_default());
    assert_eq!(load_weights(&path)?, m);

    // quantities need unit suffixes; a bare number is rejected
    let ok = RunConfig::parse("[frame]\nt_in = \"500 ns\"\nt_out = \"500 ns\"\n")?;
    println!("t_in = {:e} s", ok.neuron.frame.t_in);
    match RunConfig::parse("[frame]\nt_in = 5e-7\n") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
