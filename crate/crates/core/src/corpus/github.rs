//! Repository discovery through the GitHub search API.

use std::thread;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Deserialize;

use super::CorpusError;

pub const TOKEN_ENV: &str = "MPIASSIST_GH_TOKEN";

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub base_url: String,
    /// Search qualifiers appended to the phrase.
    pub qualifiers: String,
    pub per_page: usize,
    pub max_pages: usize,
    pub max_retries: usize,
    /// Longest single wait honored for a rate-limit response.
    pub max_wait: Duration,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            base_url: "https://api.github.com".into(),
            qualifiers: "in:name,description,readme".into(),
            per_page: 100,
            max_pages: 10,
            max_retries: 3,
            max_wait: Duration::from_secs(120),
        }
    }
}

#[derive(Deserialize)]
struct SearchPage {
    #[serde(default)]
    total_count: usize,
    #[serde(default)]
    items: Vec<RepoItem>,
}

#[derive(Deserialize)]
struct RepoItem {
    clone_url: String,
}

/// Pages through repository search results for `query` and returns the
/// clone URLs in result order.
pub fn fetch_repo_list(query: &str, token: &str, opts: &SearchOptions) -> Result<Vec<String>, CorpusError> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .http_status_as_error(false)
        .timeout_global(Some(Duration::from_secs(60)))
        .build()
        .into();
    let q = if opts.qualifiers.is_empty() { query.to_string() } else { format!("{query} {}", opts.qualifiers) };
    let url = format!("{}/search/repositories", opts.base_url.trim_end_matches('/'));
    let mut urls = Vec::new();
    for page in 1..=opts.max_pages.max(1) {
        let body = get_with_retry(&agent, &url, &q, page, token, opts)?;
        let parsed: SearchPage =
            serde_json::from_str(&body).map_err(|e| CorpusError::Format { line: 0, message: format!("search response: {e}") })?;
        let n = parsed.items.len();
        urls.extend(parsed.items.into_iter().map(|i| i.clone_url));
        if n == 0 || n < opts.per_page || urls.len() >= parsed.total_count {
            break;
        }
    }
    Ok(urls)
}

fn get_with_retry(
    agent: &ureq::Agent,
    url: &str,
    q: &str,
    page: usize,
    token: &str,
    opts: &SearchOptions,
) -> Result<String, CorpusError> {
    let mut attempt = 0;
    loop {
        let mut resp = agent
            .get(url)
            .query("q", q)
            .query("per_page", opts.per_page.to_string())
            .query("page", page.to_string())
            .header("Accept", "application/vnd.github+json")
            .header("User-Agent", "mpiassist")
            .header("Authorization", format!("Bearer {token}"))
            .call()
            .map_err(|e| CorpusError::Http { status: 0, body: e.to_string() })?;
        let status = resp.status().as_u16();
        let header = |name: &str| resp.headers().get(name).and_then(|v| v.to_str().ok()).map(str::to_string);
        let wait = rate_limit_wait(status, header("retry-after"), header("x-ratelimit-remaining"), header("x-ratelimit-reset"));
        let body = resp.body_mut().read_to_string().unwrap_or_default();
        if let Some(wait) = wait {
            if attempt >= opts.max_retries || wait > opts.max_wait {
                return Err(CorpusError::RateLimited { retry_after: wait.as_secs() });
            }
            log::warn!("rate limited on page {page}; retrying in {}s", wait.as_secs());
            thread::sleep(wait);
            attempt += 1;
            continue;
        }
        if !(200..300).contains(&status) {
            return Err(CorpusError::Http { status, body });
        }
        return Ok(body);
    }
}

fn rate_limit_wait(
    status: u16,
    retry_after: Option<String>,
    remaining: Option<String>,
    reset: Option<String>,
) -> Option<Duration> {
    if status != 403 && status != 429 {
        return None;
    }
    if let Some(secs) = retry_after.and_then(|v| v.trim().parse::<u64>().ok()) {
        return Some(Duration::from_secs(secs));
    }
    if remaining.as_deref().map(str::trim) == Some("0") {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let reset = reset.and_then(|v| v.trim().parse::<u64>().ok()).unwrap_or(now + 60);
        return Some(Duration::from_secs(reset.saturating_sub(now)));
    }
    (status == 429).then(|| Duration::from_secs(60))
}
