//! Turns a log of dated events into counts per interval.

use tsforge::series::{aggregate_events, io};

const EVENTS: &str = "Date,Location\n\
03/14/1931,Kansas\n\
11/02/1931,Ohio\n\
06/30/1932,Maine\n\
01/05/1934,Texas\n\
07/19/1934,Nevada\n\
12/24/1934,Utah\n";

fn main() -> tsforge::Result<()> {
    let events = io::read_events(EVENTS.as_bytes())?;
    for step in [12, 6] {
        let ts = aggregate_events(&events, step, None)?;
        println!("step {step} months, origin {}:", ts.start());
        io::write_series(&ts, std::io::stdout())?;
    }
    Ok(())
}
