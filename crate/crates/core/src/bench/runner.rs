use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::client::{parse_response, ClientError, SparqlClient};
use super::plan::{BenchPlan, Job, WARMUP_QUERY};
use super::report::BenchReport;
use super::BenchError;
use crate::algebra::QueryResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Timeout,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub variant: String,
    pub resource: String,
    pub repetition: usize,
    pub elapsed_ms: f64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

pub fn run_benchmark(plan: &BenchPlan) -> Result<BenchReport, BenchError> {
    run_benchmark_with(plan, &mut |_| {})
}

/// Runs the plan, passing each sample to `on_sample` as it completes.
/// An unreachable endpoint stops the run; the partial report says why.
pub fn run_benchmark_with(
    plan: &BenchPlan,
    on_sample: &mut dyn FnMut(&Sample),
) -> Result<BenchReport, BenchError> {
    plan.validate()?;
    let client = SparqlClient::new(&plan.endpoint, plan.timeout())?;
    let mut samples = Vec::new();
    let mut aborted = None;
    let mut warmup_ms = None;
    if plan.warmup {
        let start = Instant::now();
        match client.send(WARMUP_QUERY) {
            Ok(_) => warmup_ms = Some(start.elapsed().as_secs_f64() * 1000.0),
            Err(e @ ClientError::Unreachable(_)) => aborted = Some(e.to_string()),
            Err(_) => {}
        }
    }
    let jobs: Vec<(Job, usize)> = plan
        .jobs()
        .into_iter()
        .flat_map(|j| (0..plan.repetitions).map(move |r| (j.clone(), r)))
        .collect();
    for v in &plan.variants {
        if aborted.is_some() {
            break;
        }
        let run = |(job, rep): &(Job, usize)| measure(&client, &v.name, job, *rep, &v.template);
        let results: Vec<(Sample, bool)> = if plan.concurrency > 1 {
            parallel(&jobs, plan.concurrency, &run)
        } else {
            let mut out = Vec::new();
            for j in &jobs {
                let r = run(j);
                let stop = r.1;
                out.push(r);
                if stop {
                    break;
                }
            }
            out
        };
        for (s, unreachable) in results {
            on_sample(&s);
            if unreachable && aborted.is_none() {
                aborted = s.message.clone();
            }
            samples.push(s);
        }
    }
    Ok(BenchReport::new(plan, samples, warmup_ms, aborted))
}

type RunJob<'a> = dyn Fn(&(Job, usize)) -> (Sample, bool) + Sync + 'a;

fn parallel(
    jobs: &[(Job, usize)],
    workers: usize,
    run: &RunJob<'_>,
) -> Vec<(Sample, bool)> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<(Sample, bool)>>> = Mutex::new(vec![None; jobs.len()]);
    std::thread::scope(|scope| {
        for _ in 0..workers.min(jobs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(i) else { break };
                let r = run(job);
                slots.lock().expect("no panics while holding the lock")[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .flatten()
        .collect()
}

/// One timed request. The flag is set when the endpoint could not be reached.
fn measure(
    client: &SparqlClient,
    variant: &str,
    job: &Job,
    repetition: usize,
    template: &crate::syntax::QueryTemplate,
) -> (Sample, bool) {
    let mut sample = Sample {
        variant: variant.to_string(),
        resource: job.resource.clone(),
        repetition,
        elapsed_ms: 0.0,
        status: Status::Error,
        rows: None,
        message: None,
    };
    let query = match job.instantiate(template) {
        Ok(q) => q,
        Err(e) => {
            sample.message = Some(e.to_string());
            return (sample, false);
        }
    };
    let start = Instant::now();
    let outcome = client.send(&query);
    sample.elapsed_ms = start.elapsed().as_secs_f64() * 1000.0;
    let mut unreachable = false;
    match outcome.and_then(|r| {
        sample.elapsed_ms = r.elapsed.as_secs_f64() * 1000.0;
        parse_response(&r)
    }) {
        Ok(result) => {
            sample.status = Status::Ok;
            sample.rows = Some(match &result {
                QueryResult::Solutions(s) => s.rows.len(),
                QueryResult::Boolean(_) => 1,
                QueryResult::Graph(t) => t.len(),
            });
        }
        Err(ClientError::Timeout) | Err(ClientError::Status { status: 503, .. }) => {
            sample.status = Status::Timeout;
        }
        Err(e) => {
            unreachable = matches!(e, ClientError::Unreachable(_));
            sample.message = Some(e.to_string());
        }
    }
    (sample, unreachable)
}
