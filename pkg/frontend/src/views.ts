// Pure view renderers: payload in, HTML string out. No score is ever
// computed here; every displayed number is copied from the API payload.

import type {
    BenchmarkPayload,
    ComparePayload,
    GradeRecord,
    LeaderboardPayload,
    ModelPagePayload,
    ReviewCandidate,
    RunRecord,
} from './types.js';

export function escapeHtml(s: string): string {
    return s
        .replace(/&/g, '&amp;')
        .replace(/</g, '&lt;')
        .replace(/>/g, '&gt;')
        .replace(/"/g, '&quot;');
}

/** Inline error state, used instead of a blank page on any API failure. */
export function errorView(status: number, detail: string): string {
    return `<div class="error" data-status="${status}">` +
        `API error ${status}: ${escapeHtml(detail)}</div>`;
}

const BAR_WIDTH = 40;

function ciBar(low: number, high: number, mean: number): string {
    const pos = (x: number) =>
        Math.max(0, Math.min(BAR_WIDTH - 1, Math.round(x * (BAR_WIDTH - 1))));
    const cells = Array.from({ length: BAR_WIDTH }, () => '&middot;');
    for (let i = pos(low); i <= pos(high); i++) cells[i] = '=';
    cells[pos(mean)] = '#';
    return `<span class="ci-bar">[${cells.join('')}]</span>`;
}

function fmtScore(x: number): string {
    return x.toFixed(3);
}

export function leaderboardView(data: LeaderboardPayload): string {
    const parts: string[] = [
        `<section class="leaderboard" data-watermark="${data.watermark}">`,
    ];
    for (const notice of data.notices) {
        parts.push(`<p class="notice">${escapeHtml(notice)}</p>`);
    }
    for (const [benchId, rows] of Object.entries(data.per_benchmark)) {
        parts.push(`<h2>${escapeHtml(benchId)}</h2><table><tbody>`);
        for (const row of rows) {
            const cost = row.avg_cost === null ? '&mdash;' : escapeHtml(row.avg_cost);
            const flags = row.flags.length
                ? ` <span class="flags">${escapeHtml(row.flags.join(', '))}</span>`
                : '';
            parts.push(
                `<tr data-model="${escapeHtml(row.model_id)}">` +
                `<td>${escapeHtml(row.model_id)}</td>` +
                `<td class="score">${fmtScore(row.mean_score)}</td>` +
                `<td>${ciBar(row.ci_low, row.ci_high, row.mean_score)} ` +
                `${fmtScore(row.ci_low)}&ndash;${fmtScore(row.ci_high)}</td>` +
                `<td>${row.runs} runs</td><td>${cost}/run${flags}</td></tr>`);
        }
        parts.push('</tbody></table>');
    }
    parts.push('</section>');
    return parts.join('\n');
}

export function benchmarkView(data: BenchmarkPayload): string {
    const s = data.spec;
    const window = s.date_window ? `${s.date_window[0]} to ${s.date_window[1]}` : 'open';
    const header =
        `<header><h1>${escapeHtml(s.name)}</h1>` +
        `<dl><dt>category</dt><dd>${escapeHtml(s.category)}</dd>` +
        `<dt>family</dt><dd>${escapeHtml(s.family_tag)}</dd>` +
        `<dt>problems</dt><dd>${s.size}</dd>` +
        `<dt>window</dt><dd>${escapeHtml(window)}</dd>` +
        `<dt>grading</dt><dd>${escapeHtml(s.grading_pipeline)}</dd></dl></header>`;
    const table = leaderboardView({
        per_benchmark: { [s.benchmark_id]: data.rows },
        expected_performance: {}, expected_cost: {}, watermark: 0, notices: [],
    });
    return `<section class="benchmark">${header}\n${table}</section>`;
}

// Long transcripts (tool-limited runs reach hundreds of calls) are
// virtualized: only a window around each end is materialized.
const TRANSCRIPT_WINDOW = 20;

export function traceView(run: RunRecord): string {
    const parts: string[] = [
        `<article class="trace" data-status="${escapeHtml(run.status)}">`,
        `<h1>${escapeHtml(run.model_id)} on ${escapeHtml(run.problem_id)} ` +
        `(run ${run.run_index})</h1>`,
    ];
    if (run.status === 'tool-cap') {
        parts.push(`<p class="cap-indicator">tool-call cap reached after ` +
            `${run.tool_calls} calls</p>`);
    }
    const msgs = run.transcript;
    const renderMsg = (m: RunRecord['transcript'][number], i: number) =>
        `<div class="msg msg-${escapeHtml(m.role)}" data-index="${i}">` +
        `${escapeHtml(m.content)}</div>`;
    if (msgs.length <= 2 * TRANSCRIPT_WINDOW) {
        parts.push(...msgs.map(renderMsg));
    } else {
        parts.push(...msgs.slice(0, TRANSCRIPT_WINDOW).map(renderMsg));
        parts.push(`<div class="elided">&hellip; ` +
            `${msgs.length - 2 * TRANSCRIPT_WINDOW} messages elided &hellip;</div>`);
        parts.push(...msgs.slice(-TRANSCRIPT_WINDOW).map(
            (m, i) => renderMsg(m, msgs.length - TRANSCRIPT_WINDOW + i)));
    }
    parts.push(`<footer>extracted: ` +
        `${run.extracted_answer === null ? '&mdash;' : escapeHtml(run.extracted_answer)}` +
        ` | tokens ${run.usage.input_tokens}/${run.usage.output_tokens}` +
        ` | cost ${run.cost === null ? '&mdash;' : escapeHtml(run.cost)}</footer>`);
    parts.push('</article>');
    return parts.join('\n');
}

export function comparisonView(data: ComparePayload): string {
    const parts: string[] = [
        `<section class="compare"><h1>${escapeHtml(data.a)} vs ` +
        `${escapeHtml(data.b)}</h1><table><tbody>`,
    ];
    for (const [benchId, d] of Object.entries(data.benchmarks)) {
        const sign = d.score_delta > 0 ? '+' : '';
        const cost = d.cost_delta === null ? '&mdash;' : escapeHtml(d.cost_delta);
        parts.push(
            `<tr data-bench="${escapeHtml(benchId)}">` +
            `<td>${escapeHtml(benchId)}</td>` +
            `<td>${fmtScore(d.a.mean_score)}</td>` +
            `<td>${fmtScore(d.b.mean_score)}</td>` +
            `<td class="delta">${sign}${fmtScore(d.score_delta)}</td>` +
            `<td>${cost}</td></tr>`);
    }
    parts.push('</tbody></table></section>');
    return parts.join('\n');
}

export function modelView(data: ModelPagePayload): string {
    const ep = data.expected_performance === null
        ? '&mdash;' : data.expected_performance.toFixed(4);
    const parts: string[] = [
        `<section class="model"><h1>${escapeHtml(data.model_id)}</h1>`,
        `<p>expected performance ${ep}` +
        `${data.expected_rank === null ? '' : ` (rank ${data.expected_rank})`}` +
        `${data.expected_cost === null ? '' : `, expected cost ${escapeHtml(data.expected_cost)}`}</p>`,
        '<table><tbody>',
    ];
    for (const [benchId, row] of Object.entries(data.benchmarks)) {
        parts.push(`<tr><td>${escapeHtml(benchId)}</td>` +
            `<td>${fmtScore(row.mean_score)}</td>` +
            `<td>${ciBar(row.ci_low, row.ci_high, row.mean_score)}</td></tr>`);
    }
    parts.push('</tbody></table></section>');
    return parts.join('\n');
}

export function candidateCard(c: ReviewCandidate): string {
    const history = c.stage_history.map(h =>
        `<li data-stage="${escapeHtml(h.stage)}">${escapeHtml(h.stage)}: ` +
        `${escapeHtml(h.outcome)}` +
        `${h.rationale ? ` &mdash; ${escapeHtml(h.rationale)}` : ''}</li>`).join('');
    return `<article class="candidate" data-id="${escapeHtml(c.candidate_id)}">` +
        `<h2>${escapeHtml(c.paper_id)} (${escapeHtml(c.kind)})</h2>` +
        `<p class="question">${escapeHtml(c.question)}</p>` +
        `<a href="https://arxiv.org/abs/${encodeURIComponent(c.paper_id)}">paper</a>` +
        `<ol class="stage-history">${history}</ol></article>`;
}

export function gradeCard(g: GradeRecord): string {
    const judges = g.judge_transcripts.map((t, i) =>
        `<details><summary>judge ${i + 1}</summary>` +
        `<pre>${escapeHtml(JSON.stringify(t, null, 2))}</pre></details>`).join('');
    const flags = g.flags.length
        ? `<p class="flags">${escapeHtml(g.flags.join(', '))}</p>` : '';
    const audit = g.audit_note
        ? `<p class="audit">note: ${escapeHtml(g.audit_note)}</p>` : '';
    const chain = g.supersedes
        ? `<p class="supersedes">supersedes ${escapeHtml(g.supersedes)}</p>` : '';
    return `<article class="grade" data-id="${escapeHtml(g.grade_id)}">` +
        `<h2>${escapeHtml(g.model_id)} on ${escapeHtml(g.problem_id)} ` +
        `(run ${g.run_index})</h2>` +
        `<p class="score">${g.score} / ${g.max_score} via ${escapeHtml(g.method)}` +
        `${g.final ? ' (final)' : ''}</p>` +
        `${flags}${audit}${chain}${judges}</article>`;
}
