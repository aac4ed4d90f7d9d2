/**
 * Entry point: hash router over the four views, one shared session.
 *
 * Served by the gateway at /ui/, same origin as the API, so the client needs
 * no base URL. Any 401 clears the session and lands on the login screen.
 */
import { ApiClient } from "./api.js";
import { clear, el } from "./format.js";
import { SessionState } from "./session.js";
import { renderFunctions } from "./views/functions.js";
import { renderInvoke } from "./views/invoke.js";
import { renderJobDetail, renderJobs } from "./views/jobs.js";
import { renderLogin } from "./views/login.js";
const session = new SessionState();
const api = new ApiClient(session);
const appRoot = document.getElementById("app");
let teardown = null;
session.onExpired(() => {
    window.location.hash = "#/login";
    route();
});
function navBar(active) {
    const links = [
        ["#/functions", "Functions"],
        ["#/jobs", "Jobs"],
    ];
    const nav = el("nav", { class: "topnav" }, [el("span", { class: "brand" }, ["qfaas"])]);
    for (const [href, label] of links) {
        const link = el("a", { href, class: href === active ? "active" : "" }, [label]);
        nav.append(link);
    }
    const who = session.user ? `${session.user.username} (${session.user.role})` : "";
    const logout = el("button", { class: "linklike" }, ["log out"]);
    logout.addEventListener("click", () => {
        session.clear();
        window.location.hash = "#/login";
    });
    nav.append(el("span", { class: "spacer" }), el("span", { class: "muted small" }, [who]), logout);
    return nav;
}
function route() {
    teardown?.();
    teardown = null;
    const hash = window.location.hash || "#/functions";
    if (!session.loggedIn || hash === "#/login") {
        clear(appRoot);
        renderLogin(appRoot, api, () => {
            window.location.hash = "#/functions";
            route();
        });
        return;
    }
    clear(appRoot);
    const body = el("main", { class: "page" });
    if (hash.startsWith("#/invoke/")) {
        appRoot.append(navBar("#/functions"), body);
        renderInvoke(body, api, hash.slice("#/invoke/".length));
    }
    else if (hash.startsWith("#/job/")) {
        appRoot.append(navBar("#/jobs"), body);
        teardown = renderJobDetail(body, api, hash.slice("#/job/".length));
    }
    else if (hash.startsWith("#/jobs")) {
        appRoot.append(navBar("#/jobs"), body);
        teardown = renderJobs(body, api);
    }
    else {
        appRoot.append(navBar("#/functions"), body);
        renderFunctions(body, api);
    }
}
window.addEventListener("hashchange", route);
if (session.loggedIn && !session.user) {
    // Token restored from sessionStorage; re-fetch who we are.
    void api
        .me()
        .then((identity) => {
        session.setIdentity(identity);
        route();
    })
        .catch(() => route());
}
else {
    route();
}
