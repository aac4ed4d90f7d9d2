import { ApiClient, ApiError } from "../api.js";
import { clear, el } from "../format.js";

export function renderLogin(
  root: HTMLElement,
  api: ApiClient,
  onLoggedIn: () => void,
): void {
  clear(root);
  const error = el("p", { class: "form-error", hidden: "hidden" });
  const username = el("input", { id: "login-username", autocomplete: "username" });
  const password = el("input", {
    id: "login-password",
    type: "password",
    autocomplete: "current-password",
  });
  const submit = el("button", { class: "primary" }, ["Log in"]);

  const form = el("form", { class: "login-card" }, [
    el("h1", {}, ["qfaas"]),
    el("p", { class: "muted" }, ["Sign in to manage and invoke quantum functions."]),
    el("label", { for: "login-username" }, ["Username"]),
    username,
    el("label", { for: "login-password" }, ["Password"]),
    password,
    error,
    submit,
  ]);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    error.hidden = true;
    submit.setAttribute("disabled", "disabled");
    void (async () => {
      try {
        const granted = await api.login(username.value.trim(), password.value);
        api.session.establish(granted.access_token, null);
        api.session.setIdentity(await api.me());
        onLoggedIn();
      } catch (problem) {
        error.hidden = false;
        error.textContent =
          problem instanceof ApiError ? problem.message : "cannot reach the server";
      } finally {
        submit.removeAttribute("disabled");
      }
    })();
  });

  root.append(el("div", { class: "login-wrap" }, [form]));
  username.focus();
}
